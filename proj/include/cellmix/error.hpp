#pragma once

#include <stdexcept>
#include <string>

namespace cellmix {

// Bad or inconsistent input data (files, documents, unknown codes).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A well-formed request the model cannot answer (infeasible base, undefined potential, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The solver lost numerical control; results would not be trustworthy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cellmix

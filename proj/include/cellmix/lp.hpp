#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cellmix::lp {

/// One inequality row: sum(coefficients) <= rhs.
struct Row {
    std::vector<std::pair<std::size_t, double>> coefficients;  // sparse (variable, value)
    double rhs = 0;
    std::string tag;

    bool operator==(const Row&) const = default;
};

/// maximize objective.x  subject to  rows, x >= lower_bounds.
struct Problem {
    std::size_t n = 0;
    std::vector<double> objective;
    std::vector<Row> rows;
    std::vector<double> lower_bounds;  // empty means all zero

    bool operator==(const Problem&) const = default;
};

enum class Status { optimal, infeasible, unbounded };

const char* to_string(Status s);

struct Solution {
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective = 0;
    std::vector<std::string> tight_rows;
    std::size_t iterations = 0;
};

struct Tolerances {
    double feasibility = 1e-7;
    double pivot = 1e-9;
    double optimality = 1e-9;
};

/// Two-phase primal simplex on a dense tableau. Largest reduced cost enters,
/// switching to Bland's rule after 3(n+m) iterations of a phase; ties go to
/// the lowest index. Lower bounds are shifted out (x = l + y).
/// Throws std::invalid_argument on malformed input and NumericalError if the
/// result fails its own feasibility check.
Solution solve(const Problem& problem, const Tolerances& tol = {});

struct PruneResult {
    Problem problem;
    std::size_t removed = 0;
    std::optional<std::string> warning;
};

/// Drops every row dominated by a kept row (coefficients >= componentwise and
/// rhs <=). Survivors keep their input order and tags. With any negative
/// coefficient the input is returned unchanged with a warning.
PruneResult prune_dominated(const Problem& problem);

/// Exact reference optimum by enumerating basic points of rows and bounds.
/// Only for n <= 4 and at most 32 rows; throws std::invalid_argument otherwise.
Solution enumerate_vertices(const Problem& problem);

/// Plain-text listing: one row per line "c1 c2 ... <= rhs tag".
void dump(std::ostream& out, const Problem& problem);

/// Throws std::invalid_argument on dimension mismatch or non-finite data.
void validate(const Problem& problem);

}  // namespace cellmix::lp

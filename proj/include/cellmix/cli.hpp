#pragma once

#include <ostream>

namespace cellmix::cli {

/// Runs the command line tool. Returns 0 on success, 1 on input or domain
/// errors and 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cellmix::cli

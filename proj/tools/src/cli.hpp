#pragma once

#include <ostream>

namespace qpic::cli {

/// Runs the qpic front-end. Returns 0 on success, 2 on usage or validation
/// errors, 3 on numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qpic::cli

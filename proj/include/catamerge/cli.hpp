#pragma once

#include <ostream>

namespace catamerge {

/// Exit codes: 0 success, 1 usage or validation error, 2 unsatisfiable
/// (constant clash), 3 round bound exhausted.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace catamerge

#pragma once

#include <iosfwd>

namespace pburgers {

/// Exit codes: 0 success, 2 invalid arguments, 3 more than half of the
/// instances were horizon-insufficient, 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pburgers

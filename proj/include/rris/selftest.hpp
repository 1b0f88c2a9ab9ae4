#pragma once

#include <ostream>

namespace rris {

/// Quick invariant checks (closed forms, power control, gradients, channels,
/// config round-trip, determinism). Prints one PASS/FAIL line per check and
/// returns true when all pass.
bool run_selftest(std::ostream& out);

} // namespace rris

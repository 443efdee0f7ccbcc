#pragma once

#include <ostream>

namespace graphon {

// Compact invariant suite: one line per check ("ok"/"FAIL"), one summary
// line, return 0 when everything passes and 3 otherwise. Deterministic and
// self-contained; every library capability is exercised.
int run_selftest(std::ostream& out);

}  // namespace graphon

#pragma once

#include <cstdint>
#include <string>

#include "graphon/io.hpp"

namespace graphon::cli {

// Resolved invocation: the subcommand, its canonical "name key=value ..."
// parameter line (sorted, used for the config hash), the seed, and the
// manifest embedded in every file the run writes.
struct RunConfig {
    std::string subcommand;
    std::string canonical;
    std::uint64_t seed = 1;
    io::Manifest manifest;
};

// Parse argv, dispatch, write outputs atomically, print a one-line summary.
// Returns 0 on success, 2 on input/usage errors, 3 on numerical failures.
int run(int argc, const char* const* argv);

}  // namespace graphon::cli

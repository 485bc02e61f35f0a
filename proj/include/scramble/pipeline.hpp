// Orchestration of the compute modules behind the CLI modes; writes CSV
// traces and JSON reports, returns the process exit status.
#pragma once

#include <filesystem>
#include <iosfwd>

#include "scramble/config.hpp"

namespace scramble {

// Exit statuses: 0 all asserted inequalities hold, 1 an assertion failed,
// 2 usage/config/runtime error. Partial outputs are removed on errors.
int run(const RunConfig& config, const std::filesystem::path& out_dir, bool quiet,
        std::ostream& log);

}  // namespace scramble

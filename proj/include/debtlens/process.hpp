#pragma once

#include <optional>
#include <string>
#include <vector>

namespace debtlens::proc {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
    bool ok() const { return exit_code == 0; }
};

struct CommandOptions {
    std::optional<std::string> cwd;
    std::optional<std::string> stdin_data;
    // name=value pairs appended to the inherited environment
    std::vector<std::string> extra_env;
};

// Runs argv[0] with the given arguments (no shell), capturing stdout/stderr.
// Throws debtlens::Error if the process cannot be spawned.
CommandResult run(const std::vector<std::string>& argv, const CommandOptions& opts = {});

} // namespace debtlens::proc

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tabcheck {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
};

/// Runs `command` through /bin/sh -c, feeding `input` on standard input and
/// collecting both output streams. `env` entries are added to (or replace
/// entries of) the inherited environment. The child is killed once
/// `timeout_seconds` elapse. Throws AdapterError if the process cannot be
/// started.
ProcessResult run_process(const std::string& command, std::string_view input,
                          const std::vector<std::pair<std::string, std::string>>& env,
                          double timeout_seconds);

}  // namespace tabcheck

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace padicq {

enum ExitCode : int {
    exit_pass = 0,
    exit_audit_fail = 1,
    exit_bad_config = 2,
    exit_not_stabilized = 3,
    exit_io = 4,
};

/// Runs the command line front-end; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padicq

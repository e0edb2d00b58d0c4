#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nodal {

// Exit statuses of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_domain_error = 1, exit_io_error = 2 };

// Runs `nodalsim` with args (program name excluded).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace nodal

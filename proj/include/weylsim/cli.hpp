#pragma once

// Command-line front end: subcommand dispatch, config-file merging, result
// envelopes and machine-readable errors. The binary in tools/ is a thin
// wrapper around run_cli so the whole surface is testable in-process.
//
// Exit codes: 0 success, 2 parse errors, 3 validation errors, 4 resource
// caps. Failures print a JSON error object to the error stream.

#include <iosfwd>
#include <string>
#include <vector>

namespace weylsim::cli {

// argv-style invocation without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace weylsim::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lossperc {

/// Parses the command line (`lossperc <command> [flags]`), runs the command
/// and returns the process exit code: 0 success, 1 verification failure,
/// 2 configuration error, 3 I/O error, 4 unexpected internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lossperc

#ifndef GDID_CLI_HPP_
#define GDID_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace gdid {

/// Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitNumerical = 3 };

/// Entry point of the `gdid` tool with subcommands estimate, pretrends and
/// simulate. JSON goes to `out`; human-readable text goes to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gdid

#endif  // GDID_CLI_HPP_

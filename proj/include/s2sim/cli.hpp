// cli.hpp - entry point of the s2sim command-line tool
//
// Exit codes: 0 success, 1 failure (verify mismatch, runtime error, bad
// usage), 2 missing input file, 3 invalid configuration.
#ifndef S2SIM_CLI_HPP
#define S2SIM_CLI_HPP

#include <iosfwd>

namespace s2sim {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitBadConfig = 3;

int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace s2sim

#endif

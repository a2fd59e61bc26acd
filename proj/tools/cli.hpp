#ifndef QIFGAME_CLI_HPP
#define QIFGAME_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace qifgame {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kNotEquivalent = 2;
inline constexpr int kOrderingViolation = 3;

/// Runs one command line (without the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qifgame

#endif  // QIFGAME_CLI_HPP

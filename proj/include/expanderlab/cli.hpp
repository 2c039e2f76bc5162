#ifndef EXPANDERLAB_CLI_HPP_
#define EXPANDERLAB_CLI_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "expanderlab/fset.hpp"

namespace expanderlab {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFails = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitBudget = 65;

// {"field": "fp", "p": 101, "elements": [3, 5, 9]} or
// {"field": "q", "elements": ["2", "-3/2"]}. Throws kParseError and the
// field errors (kNonPrimeModulus, kContextMismatch for residues out of range).
FSet set_from_json(const nlohmann::json& j);
FSet load_set_file(const std::string& path);

// Exit code for a library error: 65 for kBudgetExceeded, 3 for
// kPrecisionCapExceeded, 64 otherwise.
int exit_code_for(ErrorCode code);

// Entry point of the expanderlab binary. argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace expanderlab

#endif  // EXPANDERLAB_CLI_HPP_

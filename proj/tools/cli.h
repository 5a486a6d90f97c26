#ifndef TEXTEXPLAIN_TOOLS_CLI_H_
#define TEXTEXPLAIN_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace textexplain {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `textexplain` command. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_TOOLS_CLI_H_

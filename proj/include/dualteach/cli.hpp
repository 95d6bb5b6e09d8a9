#ifndef DUALTEACH_CLI_HPP
#define DUALTEACH_CLI_HPP

#include <string>
#include <vector>

namespace dualteach {

// Exit codes: 0 success, 2 config error, 3 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

int cli_main(const std::vector<std::string>& args);

}  // namespace dualteach

#endif

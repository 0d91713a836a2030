#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrsched::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitLimit = 2;

// Runs one command line. args excludes the program name. The single report
// goes to `out`, diagnostics and usage to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace corrsched::cli

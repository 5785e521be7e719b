#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace taghash {

// Exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitData = 3,
    kExitNumerical = 4,
};

// Runs one command ("synth", "train", "encode", "query", "evaluate",
// "ablate") and returns its exit code. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace taghash

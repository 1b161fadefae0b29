#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spoofguard::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfig = 2,
    kUntrainable = 3,
    kIncompatible = 4,
    kCoverage = 5,
};

/// Entry point of the `spoofguard` tool. args excludes the program name.
/// Every flag can also be set through SPOOFGUARD_<FLAG> (upper case, '-' -> '_').
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace spoofguard::cli

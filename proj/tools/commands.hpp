#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gaborstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  // selftest only
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitIo = 4;

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<double> grid_step;
    std::optional<std::uint64_t> seed;
};

// Runs one subcommand and returns the exit code.  Diagnostics go to err.
int run(const std::string& command, const Options& opt, std::ostream& err);

// Full command line entry point.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gaborstab::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace oscmat::cli {

inline constexpr std::uint64_t kDefaultSeed = 0xD7DB;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CheckLine {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// The verify battery; quick uses N = 64 and 10^2 random block matrices.
std::vector<CheckLine> verify_checks(bool quick, std::uint64_t seed);

/// "1,2;3,4" -> 2x2 real matrix, "-1" -> 1x1.
std::vector<std::vector<double>> parse_matrix(const std::string& text);

/// "0.1:1.0:0.1" -> 0.1, 0.2, ..., 1.0 (end inclusive to 1e-9).
std::vector<double> parse_range(const std::string& text);

} // namespace oscmat::cli

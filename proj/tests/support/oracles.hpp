#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library, so agreement is meaningful.

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace oracle {

/// Student t CDF by composite Simpson quadrature of the density.
double t_cdf(double t, double dof);

/// Two-sided critical value by bisection on t_cdf.
double t_critical(double ci_percent, double dof);

/// Pooled two-sample t statistic, written out directly.
double pooled_t(const std::vector<double>& a, const std::vector<double>& b);

/// One row of a categorical matching instance with integer outcomes.
struct CatRow {
  int category;
  bool treated;
  long long outcome;
};

/// Exact-matching ATT in rational arithmetic: mean over treated rows whose
/// category has controls of (y - mean control y in that category).
/// Returns {numerator, denominator}; denominator 0 when nothing matches.
std::pair<long long, long long> exact_att(const std::vector<CatRow>& rows);

/// Direct evaluation of the Morlet formula and the convolution sum.
std::vector<std::vector<double>> brute_cwt(const std::vector<double>& values,
                                           const std::vector<double>& scales, double omega0);

/// Textbook hexcone RGB -> HSV, h in [0, 1).
std::array<double, 3> rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Offsets of every window of length n + d that fits, stepping by stride.
std::vector<std::size_t> window_offsets(std::size_t len, std::size_t n, std::size_t d,
                                        std::size_t stride);

/// Deterministic test RNG (xorshift64*), independent of the library's.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed * 2654435761ULL + 0x9E3779B97F4A7C15ULL) {}
  std::uint64_t next();
  double uniform();  ///< [0, 1)
  double normal();   ///< Box-Muller
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::uint64_t s_;
};

/// Directory with test data (set at build time).
std::filesystem::path data_dir();

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace oracle

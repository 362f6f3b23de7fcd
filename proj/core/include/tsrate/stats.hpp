#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tsrate {

struct TTestResult {
  double t = 0.0;  ///< +infinity when the pooled variance is zero but the means differ
  double dof = 0.0;
  double p_two_sided = 1.0;
};

/// Pooled-variance two-sample Student t-test. Both samples need >= 2 values.
TTestResult students_t(std::span<const double> a, std::span<const double> b);

/// CDF of Student's t distribution with `dof` degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided critical value for a confidence level given in percent.
double t_critical(double ci_percent, double dof);

struct PropensityResult {
  std::vector<double> score;             ///< P(treated | category); NaN for unmatchable rows
  std::vector<bool> matchable;           ///< false when the row's category lacks one group
  std::vector<std::string> unmatchable;  ///< such categories, sorted
  int iterations = 0;
  bool converged = false;
};

/// Logistic regression of `treated` on a one-hot encoding of `category`
/// (intercept plus reference coding), fit by IRLS. Categories that contain
/// only treated or only control rows are excluded from the fit and flagged.
/// Throws DataError when either group is empty.
PropensityResult propensity(std::span<const std::string> category, const std::vector<bool>& treated,
                            int max_iterations = 100, double tolerance = 1e-8);

struct MatchedPair {
  std::size_t treated = 0;
  std::size_t control = 0;                  ///< nearest control with the smallest row id
  std::vector<std::size_t> tied_controls;   ///< every control at the nearest distance, ascending
};

struct MatchedSample {
  std::vector<MatchedPair> pairs;
  std::size_t excluded_treated = 0;  ///< treated rows without a usable control
};

/// Nearest-neighbour matching on the propensity score, with replacement.
/// When `strata` is non-empty, candidates are restricted to controls of the
/// same stratum. Unmatchable rows never take part. Throws DataError when
/// there are no usable controls at all.
MatchedSample psm_match(const std::vector<double>& scores, const std::vector<bool>& treated,
                        const std::vector<bool>& matchable,
                        std::span<const std::string> strata = {});

/// Average effect on the treated: mean over pairs of
/// y[treated] - mean(y[tied_controls]). Throws DegenerateError for an empty sample.
double average_treated_effect(const MatchedSample& sample, std::span<const double> outcome);

}  // namespace tsrate

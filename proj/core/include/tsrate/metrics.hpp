#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsrate/series.hpp"

namespace tsrate {

struct WrsConfig {
  std::vector<double> cis{95.0, 75.0, 60.0};  ///< confidence levels, percent
  std::vector<double> weights{1.0, 0.8, 0.6};

  /// Throws ConfigError on unequal lengths, non-positive weights or a CI
  /// outside (0, 100).
  void validate() const;
};

struct NamedSample {
  std::string name;
  std::vector<double> values;
};

struct WrsPair {
  std::string a;
  std::string b;
  double t = 0.0;
  double dof = 0.0;
  double contribution = 0.0;
};

struct WrsResult {
  double value = 0.0;
  std::vector<std::size_t> rejections;  ///< per confidence level, summed over pairs
  std::vector<WrsPair> pairs;
};

/// sum_k weights[k] * rejections[k], in CI order.
double weighted_rejections(std::span<const std::size_t> rejections, const WrsConfig& config);

/// Sum over every unordered pair of groups and every CI of weight_i when
/// |t| exceeds the two-sided critical value. Needs >= 2 groups with >= 2
/// values each; throws DataError otherwise.
WrsResult wrs(std::span<const NamedSample> groups, const WrsConfig& config = {});

/// Groups R^max by industry.
WrsResult wrs_industry(std::span<const CausalRow> rows, const WrsConfig& config = {});

/// Company pairs within each industry, summed over industries. Industries with
/// a single company contribute nothing; at least one pair must exist.
WrsResult wrs_company(std::span<const CausalRow> rows, const WrsConfig& config = {});

/// One analysed row: confounder value, assigned treatment and outcome R^max.
struct TreatedRow {
  std::string confounder;
  Perturbation treatment = Perturbation::P0;
  double outcome = 0.0;
};

struct ApeResult {
  double ape_m = 0.0;       ///< |ATT| after propensity matching
  double ape_o = 0.0;       ///< |mean(P = p) - mean(P = P0)| on raw rows
  double signed_m = 0.0;
  double signed_o = 0.0;
  double pie_percent = 0.0; ///< ||ape_o| - |ape_m|| * 100
  std::size_t treated = 0;
  std::size_t controls = 0;
  std::size_t matched = 0;
  std::size_t excluded_treated = 0;
  std::vector<std::string> unmatchable;  ///< confounder values lacking one group
  bool converged = true;
};

/// Compares rows treated with `p` against P0 rows, matching on the propensity
/// of receiving `p` given the confounder. Rows under other treatments are
/// ignored. Throws DataError when either group is empty or nothing can be matched.
ApeResult ape(std::span<const TreatedRow> rows, Perturbation p);

/// ||ape_o| - |ape_m|| * 100.
double pie_percent(double ape_o, double ape_m);

/// Symmetric MAPE in [0, 2]; a term with truth == prediction == 0 counts as 0.
double smape(std::span<const double> truth, std::span<const double> prediction);

/// Mean absolute forecast error divided by the mean absolute first difference
/// of `train`. Throws DegenerateError when `train` is constant.
double mase(std::span<const double> train, std::span<const double> truth,
            std::span<const double> prediction);

/// Fraction of steps whose first-difference signs agree; step 1 differences
/// are taken against `anchor` for both series.
double sign_accuracy(std::span<const double> truth, std::span<const double> prediction,
                     double anchor);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;                    ///< population sd of the per-group means
  std::map<std::string, double> by_group; ///< mean per group
  std::size_t count = 0;
};

/// Mean over values within each group, then mean over groups.
Aggregate aggregate_by_group(std::span<const std::string> group, std::span<const double> value);

/// Canonical metric names used in reports.
namespace metric_name {
inline constexpr std::string_view kWrsIndustry = "WRS_I";
inline constexpr std::string_view kWrsCompany = "WRS_C";
inline constexpr std::string_view kApeIndustry = "APE_I";
inline constexpr std::string_view kApeCompany = "APE_C";
inline constexpr std::string_view kPieIndustry = "PIE_I";
inline constexpr std::string_view kPieCompany = "PIE_C";
inline constexpr std::string_view kSmape = "SMAPE";
inline constexpr std::string_view kMase = "MASE";
inline constexpr std::string_view kSignAccuracy = "SIGN_ACC";
}  // namespace metric_name

/// SIGN_ACC is the only metric where higher is better.
bool higher_is_better(std::string_view metric);

}  // namespace tsrate

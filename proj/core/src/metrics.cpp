#include "tsrate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tsrate/errors.hpp"
#include "tsrate/stats.hpp"

namespace tsrate {

void WrsConfig::validate() const {
  if (cis.empty()) throw ConfigError("WRS needs at least one confidence level");
  if (cis.size() != weights.size()) {
    throw ConfigError("WRS confidence levels and weights differ in length");
  }
  for (double c : cis) {
    if (!(c > 0.0 && c < 100.0)) throw ConfigError("WRS confidence level outside (0, 100)");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("WRS weights must be positive");
  }
}

double weighted_rejections(std::span<const std::size_t> rejections, const WrsConfig& config) {
  double v = 0.0;
  for (std::size_t k = 0; k < rejections.size(); ++k) {
    v += config.weights[k] * static_cast<double>(rejections[k]);
  }
  return v;
}

WrsResult wrs(std::span<const NamedSample> groups, const WrsConfig& config) {
  config.validate();
  if (groups.size() < 2) throw DataError("WRS needs at least two groups");
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      throw DataError("WRS group '" + g.name + "' has fewer than two observations");
    }
  }
  // Rejections are counted per CI and weighted once at the end, so equal
  // rejection patterns give bit-identical scores regardless of pair order.
  WrsResult out;
  out.rejections.assign(config.cis.size(), 0);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      const auto t = students_t(groups[i].values, groups[j].values);
      WrsPair pair{groups[i].name, groups[j].name, t.t, t.dof, 0.0};
      for (std::size_t k = 0; k < config.cis.size(); ++k) {
        if (std::abs(t.t) > t_critical(config.cis[k], t.dof)) {
          pair.contribution += config.weights[k];
          ++out.rejections[k];
        }
      }
      out.pairs.push_back(std::move(pair));
    }
  }
  out.value = weighted_rejections(out.rejections, config);
  return out;
}

namespace {

std::vector<NamedSample> group_rows(std::span<const CausalRow> rows, bool by_company,
                                    std::string_view industry_filter = {}) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : rows) {
    if (!industry_filter.empty() && r.industry != industry_filter) continue;
    groups[by_company ? r.company : r.industry].push_back(r.max_residual);
  }
  std::vector<NamedSample> out;
  for (auto& [name, v] : groups) out.push_back({name, std::move(v)});
  return out;
}

}  // namespace

WrsResult wrs_industry(std::span<const CausalRow> rows, const WrsConfig& config) {
  const auto groups = group_rows(rows, false);
  return wrs(groups, config);
}

WrsResult wrs_company(std::span<const CausalRow> rows, const WrsConfig& config) {
  std::set<std::string> industries;
  for (const auto& r : rows) industries.insert(r.industry);
  WrsResult out;
  out.rejections.assign(config.cis.size(), 0);
  for (const auto& ind : industries) {
    const auto groups = group_rows(rows, true, ind);
    if (groups.size() < 2) continue;
    auto part = wrs(groups, config);
    for (std::size_t k = 0; k < part.rejections.size(); ++k) out.rejections[k] += part.rejections[k];
    for (auto& p : part.pairs) out.pairs.push_back(std::move(p));
  }
  if (out.pairs.empty()) throw DataError("WRS_C needs an industry with at least two companies");
  out.value = weighted_rejections(out.rejections, config);
  return out;
}

ApeResult ape(std::span<const TreatedRow> rows, Perturbation p) {
  if (p == Perturbation::P0) throw DataError("APE compares a perturbation against P0, not P0 itself");
  std::vector<std::string> category;
  std::vector<bool> treated;
  std::vector<double> outcome;
  for (const auto& r : rows) {
    if (r.treatment != p && r.treatment != Perturbation::P0) continue;
    category.push_back(r.confounder);
    treated.push_back(r.treatment == p);
    outcome.push_back(r.outcome);
  }
  ApeResult out;
  out.treated = static_cast<std::size_t>(std::count(treated.begin(), treated.end(), true));
  out.controls = treated.size() - out.treated;
  if (out.treated == 0 || out.controls == 0) {
    throw DataError("APE for " + std::string(to_string(p)) +
                    " needs both treated and P0 rows");
  }
  double sum_t = 0.0;
  double sum_c = 0.0;
  for (std::size_t i = 0; i < outcome.size(); ++i) (treated[i] ? sum_t : sum_c) += outcome[i];
  out.signed_o = sum_t / static_cast<double>(out.treated) - sum_c / static_cast<double>(out.controls);

  const auto prop = propensity(category, treated);
  out.unmatchable = prop.unmatchable;
  out.converged = prop.converged;
  const auto sample = psm_match(prop.score, treated, prop.matchable, category);
  out.matched = sample.pairs.size();
  out.excluded_treated = sample.excluded_treated;
  if (sample.pairs.empty()) throw DataError("APE: no treated row could be matched");
  out.signed_m = average_treated_effect(sample, outcome);
  out.ape_o = std::abs(out.signed_o);
  out.ape_m = std::abs(out.signed_m);
  out.pie_percent = pie_percent(out.ape_o, out.ape_m);
  return out;
}

double pie_percent(double ape_o, double ape_m) {
  return std::abs(std::abs(ape_o) - std::abs(ape_m)) * 100.0;
}

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) throw DataError(std::string(what) + ": truth and prediction lengths differ");
  if (a.empty()) throw DataError(std::string(what) + ": empty input");
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double smape(std::span<const double> truth, std::span<const double> prediction) {
  check_lengths(truth, prediction, "SMAPE");
  double total = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double denom = (std::abs(truth[t]) + std::abs(prediction[t])) / 2.0;
    if (denom == 0.0) continue;
    total += std::abs(truth[t] - prediction[t]) / denom;
  }
  return total / static_cast<double>(truth.size());
}

double mase(std::span<const double> train, std::span<const double> truth,
            std::span<const double> prediction) {
  check_lengths(truth, prediction, "MASE");
  if (train.size() < 2) throw DataError("MASE: training history needs at least 2 values");
  double denom = 0.0;
  for (std::size_t i = 1; i < train.size(); ++i) denom += std::abs(train[i] - train[i - 1]);
  denom /= static_cast<double>(train.size() - 1);
  if (denom == 0.0) throw DegenerateError("MASE: constant training history");
  double num = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) num += std::abs(truth[t] - prediction[t]);
  num /= static_cast<double>(truth.size());
  return num / denom;
}

double sign_accuracy(std::span<const double> truth, std::span<const double> prediction,
                     double anchor) {
  check_lengths(truth, prediction, "sign accuracy");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double prev_truth = t == 0 ? anchor : truth[t - 1];
    const double prev_pred = t == 0 ? anchor : prediction[t - 1];
    if (sign(truth[t] - prev_truth) == sign(prediction[t] - prev_pred)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Aggregate aggregate_by_group(std::span<const std::string> group, std::span<const double> value) {
  if (group.size() != value.size()) throw DataError("aggregate: label and value lengths differ");
  if (value.empty()) throw DataError("aggregate: no values");
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < value.size(); ++i) {
    auto& a = acc[group[i]];
    a.first += value[i];
    ++a.second;
  }
  Aggregate out;
  out.count = value.size();
  for (const auto& [name, a] : acc) out.by_group[name] = a.first / static_cast<double>(a.second);
  double total = 0.0;
  for (const auto& [name, m] : out.by_group) total += m;
  out.mean = total / static_cast<double>(out.by_group.size());
  double ss = 0.0;
  for (const auto& [name, m] : out.by_group) ss += (m - out.mean) * (m - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(out.by_group.size()));
  return out;
}

bool higher_is_better(std::string_view metric) { return metric == metric_name::kSignAccuracy; }

}  // namespace tsrate

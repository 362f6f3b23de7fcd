#include "tsrate/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "tsrate/errors.hpp"

namespace tsrate {

namespace {

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double m) {
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

}  // namespace

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw DataError("student_t_cdf: dof must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(dof), t);
}

TTestResult students_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw DataError("t-test needs at least 2 observations per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  TTestResult r;
  r.dof = na + nb - 2.0;
  const double pooled = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / r.dof;
  if (pooled == 0.0) {
    if (ma == mb) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  r.p_two_sided = std::clamp(2.0 * (1.0 - student_t_cdf(std::abs(r.t), r.dof)), 0.0, 1.0);
  return r;
}

double t_critical(double ci_percent, double dof) {
  if (!(ci_percent > 0.0 && ci_percent < 100.0)) {
    throw DataError("confidence level must lie strictly between 0 and 100");
  }
  if (!(dof >= 1.0)) throw DataError("t_critical: dof must be >= 1");
  const double q = 1.0 - (1.0 - ci_percent / 100.0) / 2.0;
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), q);
}

PropensityResult propensity(std::span<const std::string> category, const std::vector<bool>& treated,
                            int max_iterations, double tolerance) {
  const std::size_t n = category.size();
  if (treated.size() != n) throw DataError("propensity: label and treatment lengths differ");
  const auto n_treated = static_cast<std::size_t>(std::count(treated.begin(), treated.end(), true));
  if (n_treated == 0 || n_treated == n) {
    throw DataError("propensity: both treated and control rows are required");
  }

  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> counts;  // treated, control
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = counts[category[i]];
    (treated[i] ? c.first : c.second)++;
  }
  PropensityResult out;
  std::map<std::string, Eigen::Index, std::less<>> column;  // matchable category -> design column
  for (const auto& [name, c] : counts) {
    if (c.first == 0 || c.second == 0) {
      out.unmatchable.push_back(name);
    } else {
      const auto k = static_cast<Eigen::Index>(column.size());
      column.emplace(name, k);  // column 0 is the reference level, absorbed by the intercept
    }
  }
  out.score.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.matchable.assign(n, false);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (column.count(category[i]) != 0) {
      out.matchable[i] = true;
      rows.push_back(i);
    }
  }
  if (rows.empty()) return out;

  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(column.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, k);
  Eigen::VectorXd y(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = rows[static_cast<std::size_t>(r)];
    x(r, 0) = 1.0;
    const auto c = column.find(category[i])->second;
    if (c > 0) x(r, c) = 1.0;
    y(r) = treated[i] ? 1.0 : 0.0;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd mu(m);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd w(m);
    Eigen::VectorXd z(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      mu(r) = 1.0 / (1.0 + std::exp(-eta(r)));
      w(r) = std::max(mu(r) * (1.0 - mu(r)), 1e-12);
      z(r) = eta(r) + (y(r) - mu(r)) / w(r);
    }
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    beta = (xtw * x).ldlt().solve(xtw * z);
    double ll = 0.0;
    const Eigen::VectorXd eta2 = x * beta;
    for (Eigen::Index r = 0; r < m; ++r) {
      // log-likelihood in a form that stays finite for large |eta|
      const double e = eta2(r);
      ll += y(r) * e - (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)));
    }
    out.iterations = it;
    if (std::abs(ll - prev_ll) < tolerance) {
      out.converged = true;
      break;
    }
    prev_ll = ll;
  }
  const Eigen::VectorXd eta = x * beta;
  for (Eigen::Index r = 0; r < m; ++r) {
    out.score[rows[static_cast<std::size_t>(r)]] = 1.0 / (1.0 + std::exp(-eta(r)));
  }
  return out;
}

MatchedSample psm_match(const std::vector<double>& scores, const std::vector<bool>& treated,
                        const std::vector<bool>& matchable, std::span<const std::string> strata) {
  const std::size_t n = scores.size();
  if (treated.size() != n || matchable.size() != n || (!strata.empty() && strata.size() != n)) {
    throw DataError("psm_match: input lengths differ");
  }
  std::vector<std::size_t> controls;
  for (std::size_t i = 0; i < n; ++i) {
    if (!treated[i] && matchable[i]) controls.push_back(i);
  }
  if (controls.empty()) throw DataError("psm_match: no usable control rows");

  MatchedSample out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!treated[i]) continue;
    if (!matchable[i]) {
      ++out.excluded_treated;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    MatchedPair pair;
    pair.treated = i;
    for (std::size_t c : controls) {  // ascending row ids
      if (!strata.empty() && strata[c] != strata[i]) continue;
      const double dist = std::abs(scores[c] - scores[i]);
      if (dist < best) {
        best = dist;
        pair.tied_controls.assign(1, c);
      } else if (dist == best) {
        pair.tied_controls.push_back(c);
      }
    }
    if (pair.tied_controls.empty()) {
      ++out.excluded_treated;
      continue;
    }
    pair.control = pair.tied_controls.front();
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

double average_treated_effect(const MatchedSample& sample, std::span<const double> outcome) {
  if (sample.pairs.empty()) throw DegenerateError("no matched pairs");
  double total = 0.0;
  for (const auto& p : sample.pairs) {
    double cm = 0.0;
    for (std::size_t c : p.tied_controls) cm += outcome[c];
    cm /= static_cast<double>(p.tied_controls.size());
    total += outcome[p.treated] - cm;
  }
  return total / static_cast<double>(sample.pairs.size());
}

}  // namespace tsrate

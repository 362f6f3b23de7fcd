#include "tsrate/forecast.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "tsrate/errors.hpp"
#include "tsrate/rng.hpp"

namespace tsrate {

std::string_view to_string(Modality m) {
  return m == Modality::kNumeric ? "numeric" : "numeric+image";
}

std::vector<double> impute_locf(const MaskedSeries& history) {
  const auto first = std::find_if(history.begin(), history.end(),
                                  [](const auto& v) { return v.has_value(); });
  if (first == history.end()) throw DataError("history has no observed values");
  std::vector<double> out(history.size());
  double last = **first;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i]) last = *history[i];
    out[i] = last;
  }
  return out;
}

namespace {

std::vector<double> drift(std::span<const double> h, std::size_t horizon) {
  const double slope = (h.back() - h.front()) / static_cast<double>(h.size() - 1);
  std::vector<double> out(horizon);
  for (std::size_t k = 0; k < horizon; ++k) out[k] = h.back() + static_cast<double>(k + 1) * slope;
  return out;
}

}  // namespace

ArResult ar_forecast(std::span<const double> history, std::size_t horizon, std::size_t p,
                     std::size_t d_diff) {
  if (p < 1) throw DataError("AR order must be >= 1");
  if (history.size() <= p + d_diff) {
    throw DataError("AR(" + std::to_string(p) + ") with " + std::to_string(d_diff) +
                    " difference(s) needs more than " + std::to_string(p + d_diff) +
                    " history values");
  }
  std::vector<std::vector<double>> levels{{history.begin(), history.end()}};
  for (std::size_t k = 0; k < d_diff; ++k) {
    const auto& prev = levels.back();
    std::vector<double> next(prev.size() - 1);
    for (std::size_t i = 1; i < prev.size(); ++i) next[i - 1] = prev[i] - prev[i - 1];
    levels.push_back(std::move(next));
  }
  const auto& y = levels.back();
  const auto rows = static_cast<Eigen::Index>(y.size() - p);
  const auto cols = static_cast<Eigen::Index>(p + 1);
  ArResult out;
  if (rows < cols) {
    out.values = drift(history, horizon);
    out.fallback = ArFallback::kSingular;
    return out;
  }
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd target(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto t = static_cast<std::size_t>(r) + p;
    x(r, 0) = 1.0;
    for (std::size_t k = 1; k <= p; ++k) x(r, static_cast<Eigen::Index>(k)) = y[t - k];
    target(r) = y[t];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols) {
    out.values = drift(history, horizon);
    out.fallback = ArFallback::kSingular;
    return out;
  }
  const Eigen::VectorXd beta = qr.solve(target);

  const auto pp = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(pp, pp);
  companion.row(0) = beta.tail(pp).transpose();
  if (pp > 1) companion.bottomLeftCorner(pp - 1, pp - 1).setIdentity();
  const double radius = companion.eigenvalues().cwiseAbs().maxCoeff();
  if (!(radius <= 1.0 + 1e-6)) {
    out.values = drift(history, horizon);
    out.fallback = ArFallback::kExplosive;
    return out;
  }

  std::vector<double> ext(y.begin(), y.end());
  for (std::size_t h = 0; h < horizon; ++h) {
    double v = beta(0);
    for (std::size_t k = 1; k <= p; ++k) v += beta(static_cast<Eigen::Index>(k)) * ext[ext.size() - k];
    ext.push_back(v);
  }
  std::vector<double> f(ext.end() - static_cast<std::ptrdiff_t>(horizon), ext.end());
  for (std::size_t k = d_diff; k-- > 0;) {
    double acc = levels[k].back();
    for (double& v : f) {
      acc += v;
      v = acc;
    }
  }
  out.values = std::move(f);
  return out;
}

ArBaseline::ArBaseline(std::string id, std::size_t p, std::size_t d_diff)
    : id_(std::move(id)), p_(p), d_diff_(d_diff) {}

ForecastResult ArBaseline::predict(const ForecastRequest& request) const {
  const auto filled = impute_locf(request.history);
  auto r = ar_forecast(filled, request.horizon, p_, d_diff_);
  ForecastResult out{std::move(r.values), {}};
  if (r.used_drift_fallback()) {
    out.warnings.push_back(std::string(r.fallback == ArFallback::kSingular ? "singular" : "explosive") +
                           " AR fit");
  }
  return out;
}

BiasedSystem::BiasedSystem(std::string id, std::map<std::string, double, std::less<>> offsets,
                           std::optional<double> default_offset)
    : id_(std::move(id)), offsets_(std::move(offsets)), default_offset_(default_offset) {}

double BiasedSystem::offset_for(std::string_view company) const {
  if (const auto it = offsets_.find(company); it != offsets_.end()) return it->second;
  if (default_offset_) return *default_offset_;
  throw DataError(id_ + ": no offset configured for company '" + std::string(company) + "'");
}

ForecastResult BiasedSystem::predict(const ForecastRequest& request) const {
  const auto& truth = request.window.truth;
  if (truth.size() != request.horizon) throw DataError(id_ + ": window truth length differs from horizon");
  const double off = offset_for(request.window.company);
  ForecastResult out;
  out.values.reserve(truth.size());
  for (double t : truth) out.values.push_back(t + off);
  return out;
}

std::map<std::string, CompanyRange, std::less<>> company_ranges(
    std::span<const LabeledSeries> series) {
  std::map<std::string, CompanyRange, std::less<>> out;
  for (const auto& s : series) {
    if (s.values.empty()) continue;
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    out[s.company] = {s.company, *mn, *mx};
  }
  return out;
}

RandomSystem::RandomSystem(std::string id, std::map<std::string, CompanyRange, std::less<>> ranges,
                           std::uint64_t seed)
    : id_(std::move(id)), ranges_(std::move(ranges)), seed_(seed) {}

ForecastResult RandomSystem::predict(const ForecastRequest& request) const {
  const auto it = ranges_.find(request.window.company);
  if (it == ranges_.end()) {
    throw DataError(id_ + ": no price range for company '" + request.window.company + "'");
  }
  const auto& r = it->second;
  const auto key = rng::mix(seed_, rng::fnv1a(request.window.window_id));
  ForecastResult out;
  out.values.resize(request.horizon);
  for (std::size_t k = 0; k < request.horizon; ++k) {
    out.values[k] = std::min(r.max, r.min + rng::uniform(key, k) * (r.max - r.min));
  }
  return out;
}

ExternalForecaster::ExternalForecaster(std::string id, Modality modality,
                                       std::span<const PredictionRecord> records)
    : id_(std::move(id)), modality_(modality) {
  for (const auto& r : records) {
    if (r.model_id != id_) continue;
    table_[{r.window_id, r.perturbation}] = r.prediction;
  }
}

bool ExternalForecaster::has(std::string_view window_id, Perturbation p) const {
  return table_.count({std::string(window_id), p}) != 0;
}

ForecastResult ExternalForecaster::predict(const ForecastRequest& request) const {
  const auto it = table_.find({request.window.window_id, request.perturbation});
  if (it == table_.end()) {
    throw DataError(id_ + ": no prediction for " + request.window.window_id + "/" +
                    std::string(to_string(request.perturbation)));
  }
  if (it->second.size() != request.horizon) {
    throw DataError(id_ + ": prediction for " + request.window.window_id + " has wrong length");
  }
  return {it->second, {}};
}

}  // namespace tsrate

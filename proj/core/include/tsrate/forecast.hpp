#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsrate/perturb.hpp"
#include "tsrate/raster.hpp"
#include "tsrate/series.hpp"

namespace tsrate {

enum class Modality { kNumeric, kNumericImage };

std::string_view to_string(Modality m);

/// Everything a forecaster may look at for one window. `history` is the
/// (possibly perturbed) input; `window` carries ids, labels and, for
/// oracle-style baselines, the truth.
struct ForecastRequest {
  const EvalWindow& window;
  const MaskedSeries& history;
  Perturbation perturbation = Perturbation::P0;
  std::size_t horizon = 20;
  const RgbImage* image = nullptr;
};

struct ForecastResult {
  std::vector<double> values;
  std::vector<std::string> warnings;
};

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual const std::string& id() const = 0;
  virtual Modality modality() const = 0;
  /// Returns exactly request.horizon values or throws.
  virtual ForecastResult predict(const ForecastRequest& request) const = 0;
};

/// Replaces missing entries with the previous observation; leading gaps take
/// the first observation. Throws DataError when every entry is missing.
std::vector<double> impute_locf(const MaskedSeries& history);

enum class ArFallback {
  kNone,
  kSingular,   ///< rank-deficient design matrix
  kExplosive,  ///< fitted AR polynomial has a root of modulus > 1
};

struct ArResult {
  std::vector<double> values;
  ArFallback fallback = ArFallback::kNone;
  bool used_drift_fallback() const { return fallback != ArFallback::kNone; }
};

/// AR(p) with intercept on the d_diff-times differenced series, fit by OLS,
/// forecast recursively and integrated back. A rank-deficient design or an
/// explosive fit (companion eigenvalue modulus above 1 + 1e-6) falls back to
/// the drift forecast last + k * (last - first) / (len - 1).
ArResult ar_forecast(std::span<const double> history, std::size_t horizon, std::size_t p = 5,
                     std::size_t d_diff = 1);

class ArBaseline final : public Forecaster {
 public:
  explicit ArBaseline(std::string id, std::size_t p = 5, std::size_t d_diff = 1);
  const std::string& id() const override { return id_; }
  Modality modality() const override { return Modality::kNumeric; }
  ForecastResult predict(const ForecastRequest& request) const override;

 private:
  std::string id_;
  std::size_t p_;
  std::size_t d_diff_;
};

/// Prediction = truth + per-company offset.
class BiasedSystem final : public Forecaster {
 public:
  BiasedSystem(std::string id, std::map<std::string, double, std::less<>> offsets,
               std::optional<double> default_offset);
  const std::string& id() const override { return id_; }
  Modality modality() const override { return Modality::kNumeric; }
  ForecastResult predict(const ForecastRequest& request) const override;

  double offset_for(std::string_view company) const;

 private:
  std::string id_;
  std::map<std::string, double, std::less<>> offsets_;
  std::optional<double> default_offset_;
};

struct CompanyRange {
  std::string company;
  double min = 0.0;
  double max = 0.0;
};

/// Min and max of each company's loaded series.
std::map<std::string, CompanyRange, std::less<>> company_ranges(
    std::span<const LabeledSeries> series);

/// Uniform draws in the company's historical range, keyed by (seed, window id).
class RandomSystem final : public Forecaster {
 public:
  RandomSystem(std::string id, std::map<std::string, CompanyRange, std::less<>> ranges,
               std::uint64_t seed);
  const std::string& id() const override { return id_; }
  Modality modality() const override { return Modality::kNumeric; }
  ForecastResult predict(const ForecastRequest& request) const override;

 private:
  std::string id_;
  std::map<std::string, CompanyRange, std::less<>> ranges_;
  std::uint64_t seed_;
};

/// Serves predictions loaded from an exchange file.
class ExternalForecaster final : public Forecaster {
 public:
  ExternalForecaster(std::string id, Modality modality, std::span<const PredictionRecord> records);
  const std::string& id() const override { return id_; }
  Modality modality() const override { return modality_; }
  ForecastResult predict(const ForecastRequest& request) const override;
  bool has(std::string_view window_id, Perturbation p) const;

 private:
  std::string id_;
  Modality modality_;
  std::map<std::pair<std::string, Perturbation>, std::vector<double>> table_;
};

}  // namespace tsrate

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsrate/raster.hpp"
#include "tsrate/series.hpp"

namespace tsrate {

/// A numeric series in which individual observations may be missing.
/// Missing entries are std::nullopt, never NaN.
using MaskedSeries = std::vector<std::optional<double>>;

MaskedSeries to_masked(std::span<const double> values);
std::size_t count_missing(const MaskedSeries& s);

/// Positions touched by the periodic perturbations: i with (i + 1 + phase) % period == 0.
/// With phase 0 these are period-1, 2*period-1, ...
bool is_periodic_index(std::size_t i, std::size_t period, std::size_t phase = 0);

/// P1: every period-th value set to zero.
std::vector<double> drop_to_zero(std::span<const double> values, std::size_t period,
                                 std::size_t phase = 0);
/// P2: every period-th value halved.
std::vector<double> halve(std::span<const double> values, std::size_t period,
                          std::size_t phase = 0);
/// P3: every period-th value replaced by the missing marker.
MaskedSeries missing(std::span<const double> values, std::size_t period, std::size_t phase = 0);

struct NumericPerturbationParams {
  std::size_t period = 80;
  std::size_t phase = 0;
};

/// Applies P0-P3 to a clean series. P4-P6 leave numeric data untouched.
MaskedSeries apply_numeric(Perturbation p, std::span<const double> values,
                           const NumericPerturbationParams& params);

/// P4: pixel (floor(w/2), floor(h/2)) set to black.
RgbImage pixel_center_black(const RgbImage& image);

/// P5: saturation multiplied by `factor` in hexcone HSV, clamped to [0, 1].
RgbImage saturation_scale(const RgbImage& image, double factor = 10.0);

/// Sentiment label in {-1, 0, 1} for one window.
struct SentimentInput {
  const RgbImage& line_plot;
  std::span<const double> values;
};

class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  virtual int label(const SentimentInput& input) const = 0;
  virtual std::string name() const = 0;
};

/// Sign of the least-squares slope of the plotted values, with a +/-dead_band.
class SlopeSignSentiment final : public SentimentProvider {
 public:
  explicit SlopeSignSentiment(double dead_band = 1e-9) : dead_band_(dead_band) {}
  int label(const SentimentInput& input) const override;
  std::string name() const override { return "slope-sign"; }

 private:
  double dead_band_;
};

class SentimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kStripeRows = 16;

/// {-1, 0, 1} -> {0, 128, 255} via round((label + 1) * 127.5).
std::uint8_t sentiment_intensity(int label);

/// P6: a kStripeRows-high gray stripe, as wide as the plot, encoding the
/// provider's label. Provider failures surface as SentimentError.
RgbImage sentiment_stripe(const RgbImage& line_plot, std::span<const double> values,
                          const SentimentProvider& provider);

/// Overlays `stripe` on the top rows of `base`.
RgbImage overlay_stripe(const RgbImage& base, const RgbImage& stripe);

/// Weighted treatment assignment used to make P depend on Z.
struct TreatmentDistribution {
  std::string name;
  ConfounderField field = ConfounderField::kIndustry;
  std::string favored;
  double weight_ratio = 2.0;
  std::uint64_t seed = 0;
};

/// Per-level sampling weights for a row: (1, r, ..., r) when the row carries
/// the favoured value (P0 first in `levels`), uniform otherwise.
std::vector<double> treatment_weights(std::span<const Perturbation> levels, bool favored,
                                      double weight_ratio);

/// Draws one level per row. Row i uses counter i, so the result is
/// reproducible and independent of evaluation order. Throws DataError when the
/// favoured value does not occur among `confounder_values`.
std::vector<Perturbation> assign_treatments(std::span<const std::string> confounder_values,
                                            const TreatmentDistribution& distribution,
                                            std::span<const Perturbation> levels);

}  // namespace tsrate

#include "tsrate/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsrate/errors.hpp"
#include "tsrate/rng.hpp"

namespace tsrate {

namespace {

void check_period(std::size_t period, std::size_t phase) {
  if (period < 1) throw DataError("perturbation period must be >= 1");
  if (phase >= period) throw DataError("perturbation phase must be < period");
}

}  // namespace

MaskedSeries to_masked(std::span<const double> values) {
  return MaskedSeries(values.begin(), values.end());
}

std::size_t count_missing(const MaskedSeries& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](const auto& v) { return !v.has_value(); }));
}

bool is_periodic_index(std::size_t i, std::size_t period, std::size_t phase) {
  return (i + 1 + phase) % period == 0;
}

std::vector<double> drop_to_zero(std::span<const double> values, std::size_t period,
                                 std::size_t phase) {
  check_period(period, phase);
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (is_periodic_index(i, period, phase)) out[i] = 0.0;
  }
  return out;
}

std::vector<double> halve(std::span<const double> values, std::size_t period, std::size_t phase) {
  check_period(period, phase);
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (is_periodic_index(i, period, phase)) out[i] /= 2.0;
  }
  return out;
}

MaskedSeries missing(std::span<const double> values, std::size_t period, std::size_t phase) {
  check_period(period, phase);
  MaskedSeries out = to_masked(values);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (is_periodic_index(i, period, phase)) out[i].reset();
  }
  return out;
}

MaskedSeries apply_numeric(Perturbation p, std::span<const double> values,
                           const NumericPerturbationParams& params) {
  switch (p) {
    case Perturbation::P1: return to_masked(drop_to_zero(values, params.period, params.phase));
    case Perturbation::P2: return to_masked(halve(values, params.period, params.phase));
    case Perturbation::P3: return missing(values, params.period, params.phase);
    default: return to_masked(values);
  }
}

RgbImage pixel_center_black(const RgbImage& image) {
  if (image.empty()) throw DataError("pixel_center_black: empty image");
  RgbImage out = image;
  out.set(image.width() / 2, image.height() / 2, {0, 0, 0});
  return out;
}

RgbImage saturation_scale(const RgbImage& image, double factor) {
  if (!(factor >= 0.0)) throw DataError("saturation factor must be >= 0");
  RgbImage out = image;
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      auto hsv = rgb_to_hsv(image.at(x, y));
      if (hsv.s == 0.0) continue;
      hsv.s = std::clamp(hsv.s * factor, 0.0, 1.0);
      out.set(x, y, hsv_to_rgb(hsv));
    }
  }
  return out;
}

int SlopeSignSentiment::label(const SentimentInput& input) const {
  const auto& v = input.values;
  if (v.size() < 2) throw SentimentError("slope-sign sentiment needs at least 2 values");
  const double n = static_cast<double>(v.size());
  const double xbar = (n - 1.0) / 2.0;
  const double ybar = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxy += dx * (v[i] - ybar);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  if (slope > dead_band_) return 1;
  if (slope < -dead_band_) return -1;
  return 0;
}

std::uint8_t sentiment_intensity(int label) {
  if (label < -1 || label > 1) {
    throw SentimentError("sentiment label " + std::to_string(label) + " outside {-1, 0, 1}");
  }
  return static_cast<std::uint8_t>(std::lround((label + 1) * 127.5));
}

RgbImage sentiment_stripe(const RgbImage& line_plot, std::span<const double> values,
                          const SentimentProvider& provider) {
  int label = 0;
  try {
    label = provider.label(SentimentInput{line_plot, values});
  } catch (const SentimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw SentimentError("sentiment provider '" + provider.name() + "' failed: " + e.what());
  }
  const auto g = sentiment_intensity(label);
  const std::size_t width = line_plot.empty() ? 128 : line_plot.width();
  return RgbImage(width, kStripeRows, {g, g, g});
}

RgbImage overlay_stripe(const RgbImage& base, const RgbImage& stripe) {
  if (stripe.width() != base.width() || stripe.height() > base.height()) {
    throw DataError("overlay_stripe: stripe does not fit the base image");
  }
  RgbImage out = base;
  for (std::size_t y = 0; y < stripe.height(); ++y) {
    for (std::size_t x = 0; x < stripe.width(); ++x) out.set(x, y, stripe.at(x, y));
  }
  return out;
}

std::vector<double> treatment_weights(std::span<const Perturbation> levels, bool favored,
                                      double weight_ratio) {
  std::vector<double> w(levels.size(), 1.0);
  if (favored) {
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (levels[k] != Perturbation::P0) w[k] = weight_ratio;
    }
  }
  return w;
}

std::vector<Perturbation> assign_treatments(std::span<const std::string> confounder_values,
                                            const TreatmentDistribution& distribution,
                                            std::span<const Perturbation> levels) {
  if (!(distribution.weight_ratio > 0.0)) {
    throw DataError("distribution '" + distribution.name + "': weight_ratio must be > 0");
  }
  if (levels.empty()) throw DataError("assign_treatments: no treatment levels");
  if (std::find(confounder_values.begin(), confounder_values.end(), distribution.favored) ==
      confounder_values.end()) {
    throw DataError("distribution '" + distribution.name + "': favoured value '" +
                    distribution.favored + "' does not occur in the " +
                    std::string(to_string(distribution.field)) + " labels");
  }
  const auto fav_w = treatment_weights(levels, true, distribution.weight_ratio);
  const auto base_w = treatment_weights(levels, false, distribution.weight_ratio);
  const double fav_total = std::accumulate(fav_w.begin(), fav_w.end(), 0.0);
  const double base_total = std::accumulate(base_w.begin(), base_w.end(), 0.0);

  std::vector<Perturbation> out(confounder_values.size());
  for (std::size_t i = 0; i < confounder_values.size(); ++i) {
    const bool fav = confounder_values[i] == distribution.favored;
    const auto& w = fav ? fav_w : base_w;
    const double u = rng::uniform(distribution.seed, i) * (fav ? fav_total : base_total);
    double acc = 0.0;
    std::size_t k = 0;
    for (; k + 1 < w.size(); ++k) {
      acc += w[k];
      if (u < acc) break;
    }
    out[i] = levels[k];
  }
  return out;
}

}  // namespace tsrate

#include "tsrate/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "tsrate/errors.hpp"
#include "tsrate/ingest.hpp"

namespace tsrate {

std::complex<double> morlet(double x, double s, double omega0) {
  if (!(s > 0.0)) throw DataError("morlet: scale must be positive");
  const double amp = std::sqrt(1.0 / s) * std::pow(std::numbers::pi, -0.25) *
                     std::exp(-(x * x) / (2.0 * s * s));
  const double phase = omega0 * x / s;
  return {amp * std::cos(phase), amp * std::sin(phase)};
}

double scale_for_period(double period, double omega0) {
  return omega0 * period / (2.0 * std::numbers::pi);
}

std::vector<double> default_scales(std::size_t n, std::size_t count, double omega0) {
  // periods span 2..n, so n == 2 would collapse the grid to one repeated scale
  if (n < 3) throw DataError("default_scales: window must have at least 3 samples");
  if (count == 0) throw DataError("default_scales: count must be positive");
  std::vector<double> out(count);
  const double lo = std::log(2.0);
  const double hi = std::log(static_cast<double>(n));
  for (std::size_t i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = scale_for_period(std::exp(lo + f * (hi - lo)), omega0);
  }
  return out;
}

Spectrogram cwt(std::span<const double> values, std::span<const double> scales, double omega0) {
  if (values.size() < 2) throw DataError("cwt: need at least 2 samples");
  if (scales.empty()) throw DataError("cwt: empty scale grid");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !std::isfinite(scales[i])) {
      throw DataError("cwt: scales must be positive and finite");
    }
    if (i > 0 && !(scales[i] > scales[i - 1])) throw DataError("cwt: scales must ascend");
  }
  const std::size_t n = values.size();
  Spectrogram out;
  out.scales.assign(scales.begin(), scales.end());
  out.omega0 = omega0;
  out.magnitudes.assign(scales.size(), std::vector<double>(n, 0.0));
  // psi(k) for k = u - t in [-(n-1), n-1], indexed by k + n - 1.
  std::vector<std::complex<double>> kernel(2 * n - 1);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    for (std::size_t j = 0; j < kernel.size(); ++j) {
      const double k = static_cast<double>(j) - static_cast<double>(n - 1);
      kernel[j] = std::conj(morlet(k, scales[i], omega0));
    }
    for (std::size_t t = 0; t < n; ++t) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t u = 0; u < n; ++u) acc += values[u] * kernel[u + n - 1 - t];
      out.magnitudes[i][t] = std::abs(acc);
    }
  }
  return out;
}

std::vector<double> resample_linear(std::span<const double> values, std::size_t count) {
  if (values.empty()) throw DataError("resample_linear: empty input");
  std::vector<double> out(count);
  if (values.size() == 1) {
    std::fill(out.begin(), out.end(), values[0]);
    return out;
  }
  const double last = static_cast<double>(values.size() - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double pos =
        count == 1 ? 0.0 : last * static_cast<double>(i) / static_cast<double>(count - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= values.size()) {
      out[i] = values.back();
      continue;
    }
    const double f = pos - static_cast<double>(lo);
    out[i] = values[lo] + f * (values[lo + 1] - values[lo]);
  }
  return out;
}

namespace {

std::uint8_t to_byte(double x) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

}  // namespace

Rgb jet(double x) {
  x = std::clamp(x, 0.0, 1.0);
  const auto ch = [x](double c) { return to_byte(1.5 - std::abs(4.0 * x - c)); };
  return {ch(3.0), ch(2.0), ch(1.0)};
}

RgbImage compose_image(const Spectrogram& spec, std::span<const double> stripe_values) {
  if (spec.rows() == 0 || spec.cols() == 0) throw DataError("compose_image: empty spectrogram");
  if (stripe_values.empty()) throw DataError("compose_image: empty stripe");
  RgbImage img(kImageSize, kImageSize, {128, 128, 128});

  const auto stripe = stripe_values.size() == kImageSize
                          ? std::vector<double>(stripe_values.begin(), stripe_values.end())
                          : resample_linear(stripe_values, kImageSize);
  const auto [smin, smax] = std::minmax_element(stripe.begin(), stripe.end());
  const double slo = *smin;
  const double shi = *smax;
  for (std::size_t x = 0; x < kImageSize; ++x) {
    std::uint8_t g = 128;
    if (shi > slo) g = to_byte((stripe[x] - slo) / (shi - slo));
    for (std::size_t y = 0; y < kImageSize - kSpectrogramRows; ++y) img.set(x, y, {g, g, g});
  }

  // Resample along time, then along scale, to kSpectrogramRows x kImageSize.
  std::vector<std::vector<double>> by_time(spec.rows());
  for (std::size_t r = 0; r < spec.rows(); ++r) {
    by_time[r] = resample_linear(spec.magnitudes[r], kImageSize);
  }
  std::vector<std::vector<double>> grid(kSpectrogramRows, std::vector<double>(kImageSize));
  std::vector<double> column(spec.rows());
  for (std::size_t x = 0; x < kImageSize; ++x) {
    for (std::size_t r = 0; r < spec.rows(); ++r) column[r] = by_time[r][x];
    const auto resampled = resample_linear(column, kSpectrogramRows);
    for (std::size_t r = 0; r < kSpectrogramRows; ++r) grid[r][x] = resampled[r];
  }
  double lo = grid[0][0];
  double hi = grid[0][0];
  for (const auto& row : grid) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const std::size_t top = kImageSize - kSpectrogramRows;
  for (std::size_t r = 0; r < kSpectrogramRows; ++r) {
    for (std::size_t x = 0; x < kImageSize; ++x) {
      const Rgb c = hi > lo ? jet((grid[r][x] - lo) / (hi - lo)) : Rgb{128, 128, 128};
      img.set(x, top + r, c);
    }
  }
  return img;
}

RgbImage spectrogram_image(std::span<const double> values, double omega0) {
  const auto z = standardize(values);
  const auto scales = default_scales(z.size(), kSpectrogramRows, omega0);
  return compose_image(cwt(z, scales, omega0), z);
}

std::vector<std::pair<std::size_t, std::size_t>> lineplot_vertices(std::span<const double> values,
                                                                   const LinePlotStyle& style) {
  if (values.size() < 2) throw DataError("render_lineplot: need at least 2 samples");
  if (style.margin_left + style.margin_right + 2 > style.width ||
      style.margin_top + style.margin_bottom + 2 > style.height) {
    throw DataError("render_lineplot: margins leave no drawing area");
  }
  const double x_span = static_cast<double>(style.width - style.margin_left - style.margin_right - 1);
  const double y_span = static_cast<double>(style.height - style.margin_top - style.margin_bottom - 1);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn;
  const double hi = *mx;
  const double last = static_cast<double>(values.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto x = style.margin_left +
                   static_cast<std::size_t>(std::lround(x_span * static_cast<double>(i) / last));
    std::size_t y = style.height / 2;
    if (hi > lo) {
      y = style.margin_top + static_cast<std::size_t>(std::lround(y_span * (hi - values[i]) / (hi - lo)));
    }
    out[i] = {x, y};
  }
  return out;
}

RgbImage render_lineplot(std::span<const double> values, const LinePlotStyle& style) {
  const auto pts = lineplot_vertices(values, style);
  RgbImage img(style.width, style.height, style.background);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    // Bresenham between consecutive vertices.
    long x0 = static_cast<long>(pts[i].first);
    long y0 = static_cast<long>(pts[i].second);
    const long x1 = static_cast<long>(pts[i + 1].first);
    const long y1 = static_cast<long>(pts[i + 1].second);
    const long dx = std::labs(x1 - x0);
    const long dy = -std::labs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1;
    const long sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    while (true) {
      img.set(static_cast<std::size_t>(x0), static_cast<std::size_t>(y0), style.line);
      if (x0 == x1 && y0 == y1) break;
      const long e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  return img;
}

}  // namespace tsrate

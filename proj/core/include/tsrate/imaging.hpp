#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tsrate/raster.hpp"

namespace tsrate {

inline constexpr double kDefaultOmega0 = 5.0;
inline constexpr std::size_t kImageSize = 128;
inline constexpr std::size_t kSpectrogramRows = 112;

/// Morlet wavelet sqrt(1/s) pi^(-1/4) exp(-x^2 / 2s^2) exp(j omega0 x / s).
/// Throws DataError for s <= 0.
std::complex<double> morlet(double x, double s, double omega0 = kDefaultOmega0);

/// Time-frequency magnitudes. Row i belongs to scales[i]; scales ascend, so
/// the highest frequencies sit in row 0.
struct Spectrogram {
  std::vector<std::vector<double>> magnitudes;  ///< [scale][time]
  std::vector<double> scales;
  double omega0 = kDefaultOmega0;

  std::size_t rows() const { return magnitudes.size(); }
  std::size_t cols() const { return magnitudes.empty() ? 0 : magnitudes.front().size(); }
};

/// Scale whose Morlet centre frequency equals 1/period (cycles per sample).
double scale_for_period(double period, double omega0 = kDefaultOmega0);

/// `count` log-spaced scales covering periods 2..n samples, ascending.
std::vector<double> default_scales(std::size_t n, std::size_t count = kSpectrogramRows,
                                   double omega0 = kDefaultOmega0);

/// Direct convolution with zero padding:
/// magnitudes[i][t] = |sum_u values[u] * conj(psi(u - t; scales[i]))|.
Spectrogram cwt(std::span<const double> values, std::span<const double> scales,
                double omega0 = kDefaultOmega0);

/// Linear interpolation of `values` onto `count` evenly spaced points
/// (end points preserved).
std::vector<double> resample_linear(std::span<const double> values, std::size_t count);

/// Classic "jet" colormap, x in [0, 1].
Rgb jet(double x);

/// 128x128 image: rows 0..15 hold the stripe values as grayscale, rows
/// 16..127 the spectrogram magnitudes (per-image min-max, jet colours).
/// Constant inputs render as mid-gray.
RgbImage compose_image(const Spectrogram& spec, std::span<const double> stripe_values);

/// Standardizes the window, runs the CWT on the default grid and composes the
/// image with the standardized series as stripe.
RgbImage spectrogram_image(std::span<const double> values, double omega0 = kDefaultOmega0);

struct LinePlotStyle {
  std::size_t width = kImageSize;
  std::size_t height = kImageSize;
  std::size_t margin_left = 4;
  std::size_t margin_right = 4;
  std::size_t margin_top = 20;  ///< leaves room for the sentiment stripe
  std::size_t margin_bottom = 4;
  Rgb background{255, 255, 255};
  Rgb line{31, 119, 180};
};

/// Pixel coordinates (x, y) of each sample, y growing downward. A constant
/// series maps to the canvas middle row.
std::vector<std::pair<std::size_t, std::size_t>> lineplot_vertices(
    std::span<const double> values, const LinePlotStyle& style = {});

/// Polyline through lineplot_vertices on a white canvas.
RgbImage render_lineplot(std::span<const double> values, const LinePlotStyle& style = {});

}  // namespace tsrate

#include "tsrate/raster.hpp"

#include <algorithm>
#include <cmath>

#include "tsrate/errors.hpp"

namespace tsrate {

RgbImage::RgbImage(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), data_(width * height * 3) {
  for (std::size_t i = 0; i < width * height; ++i) {
    std::copy(fill.begin(), fill.end(), data_.begin() + static_cast<std::ptrdiff_t>(i * 3));
  }
}

Rgb RgbImage::at(std::size_t x, std::size_t y) const {
  const std::size_t i = (y * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void RgbImage::set(std::size_t x, std::size_t y, Rgb c) {
  const std::size_t i = (y * width_ + x) * 3;
  data_[i] = c[0];
  data_[i + 1] = c[1];
  data_[i + 2] = c[2];
}

std::size_t diff_count(const RgbImage& a, const RgbImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("diff_count: image dimensions differ");
  }
  std::size_t n = 0;
  for (std::size_t y = 0; y < a.height(); ++y) {
    for (std::size_t x = 0; x < a.width(); ++x) n += a.at(x, y) != b.at(x, y);
  }
  return n;
}

Hsv rgb_to_hsv(Rgb c) {
  const double r = c[0] / 255.0;
  const double g = c[1] / 255.0;
  const double b = c[2] / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) return out;
  double h;
  if (mx == r) {
    h = (g - b) / delta;
  } else if (mx == g) {
    h = 2.0 + (b - r) / delta;
  } else {
    h = 4.0 + (r - g) / delta;
  }
  h /= 6.0;
  if (h < 0.0) h += 1.0;
  out.h = h;
  return out;
}

Rgb hsv_to_rgb(const Hsv& c) {
  const double v = c.v;
  const double s = std::clamp(c.s, 0.0, 1.0);
  double h6 = c.h * 6.0;
  h6 -= 6.0 * std::floor(h6 / 6.0);
  const int sector = std::min(static_cast<int>(h6), 5);
  const double f = h6 - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  double r, g, b;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  auto to8 = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(x * 255.0), 0L, 255L));
  };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace tsrate

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tsrate {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB image, row-major, interleaved channels.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height, Rgb fill = {0, 0, 0});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgb at(std::size_t x, std::size_t y) const;
  void set(std::size_t x, std::size_t y, Rgb c);

  const std::vector<std::uint8_t>& bytes() const { return data_; }
  std::vector<std::uint8_t>& bytes() { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Number of pixels whose RGB triple differs. Images must share dimensions.
std::size_t diff_count(const RgbImage& a, const RgbImage& b);

/// Hexcone HSV with h in [0, 1), s and v in [0, 1].
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

Hsv rgb_to_hsv(Rgb c);
Rgb hsv_to_rgb(const Hsv& c);

}  // namespace tsrate

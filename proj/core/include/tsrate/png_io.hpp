#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tsrate/raster.hpp"

namespace tsrate {

/// PNG file bytes for an 8-bit RGB image.
std::vector<std::uint8_t> encode_png(const RgbImage& image);

/// Writes an 8-bit RGB PNG. Output bytes depend only on the pixel data.
void write_png(const std::filesystem::path& path, const RgbImage& image);

RgbImage read_png(const std::filesystem::path& path);

}  // namespace tsrate

#pragma once

#include "geogs/types.hpp"

#include <cstdint>
#include <filesystem>

namespace geogs {

/// Standard sRGB transfer curve.
double srgb_to_linear(double v);
double linear_to_srgb(double v);

/// Linear [0,1] value to an 8-bit sRGB code (clamped) and back.
std::uint8_t encode_srgb8(double linear);
double decode_srgb8(std::uint8_t code);

/// 8-bit sRGB PNG converted to linear RGB. Alpha is dropped, grayscale expanded.
Image read_png(const std::filesystem::path& path);
/// Linear image written as 8-bit sRGB RGB PNG.
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace geogs

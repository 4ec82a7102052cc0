#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "synthdet/image.hpp"

namespace synthdet {

// Minimal PNG codec over zlib. Writer emits non-interlaced images with
// filter 0 on every scanline, so output bytes are a pure function of the
// pixels. Reader handles non-interlaced 8/16-bit grayscale and 8-bit
// RGB/RGBA with all five scanline filters.

void write_png(const std::filesystem::path& path, const ImageRgb8& image);
void write_png(const std::filesystem::path& path, const ImageGray16& image);

std::vector<std::uint8_t> encode_png(const ImageRgb8& image);
std::vector<std::uint8_t> encode_png(const ImageGray16& image);

ImageRgb8 read_png_rgb8(const std::filesystem::path& path);
ImageGray16 read_png_gray16(const std::filesystem::path& path);

ImageRgb8 decode_png_rgb8(const std::vector<std::uint8_t>& bytes);
ImageGray16 decode_png_gray16(const std::vector<std::uint8_t>& bytes);

}  // namespace synthdet

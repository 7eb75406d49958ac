#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace afe {

/// 8-bit raster, interleaved channels (1 = gray, 3 = RGB), row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
    return pixels[(y * width + x) * channels + c];
  }
};

/// Binary PGM (P5) or PPM (P6) with maxval 255.
Image decode_pnm(std::string_view bytes);
Image read_pnm(const std::filesystem::path& path);
std::string encode_pnm(const Image& image);
void write_pnm(const std::filesystem::path& path, const Image& image);

/// Luma in [0, 1]: gray / 255, or (0.299 R + 0.587 G + 0.114 B) / 255.
std::vector<double> luminance(const Image& image);

}  // namespace afe

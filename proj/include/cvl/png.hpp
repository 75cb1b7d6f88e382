#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cvl {

// Minimal PNG encoder: 8-bit grayscale or RGB, zlib stream with stored
// (uncompressed) deflate blocks. Output is a valid PNG and bit-identical
// across runs for identical input.
std::vector<uint8_t> encode_png_gray8(uint32_t width, uint32_t height,
                                      std::span<const uint8_t> pixels);
std::vector<uint8_t> encode_png_rgb8(uint32_t width, uint32_t height,
                                     std::span<const uint8_t> pixels); // 3 bytes per pixel

void write_png_gray8(const std::string& path, uint32_t width, uint32_t height,
                     std::span<const uint8_t> pixels);
void write_png_rgb8(const std::string& path, uint32_t width, uint32_t height,
                    std::span<const uint8_t> pixels);

} // namespace cvl

#pragma once

// Minimal 8-bit grayscale PNG output (zlib for DEFLATE and CRC32). Enough to
// dump sample grids and plots; no reading, no color types beyond gray.

#include <cstdint>
#include <string>
#include <vector>

#include "ossgan/tensor.hpp"

namespace ossgan::img {

struct GrayImage {
    int64_t width = 0;
    int64_t height = 0;
    std::vector<uint8_t> pixels;  // row-major, width*height

    uint8_t& at(int64_t y, int64_t x) { return pixels[static_cast<size_t>(y * width + x)]; }
    uint8_t at(int64_t y, int64_t x) const { return pixels[static_cast<size_t>(y * width + x)]; }
};

// PNG bytes for a grayscale image; deterministic for fixed input
std::vector<uint8_t> encode_png_gray(const GrayImage& image);
void write_png_gray(const std::string& path, const GrayImage& image);

// tile [n,1,s,s] images in [-1,1] into a grid with 1px separators,
// mapping -1 -> 0 and +1 -> 255
GrayImage make_grid(const Tensor& images, int64_t cols);

}  // namespace ossgan::img

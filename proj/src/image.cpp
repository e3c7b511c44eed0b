#include "ossgan/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "ossgan/errors.hpp"
#include "ossgan/serialize.hpp"

namespace ossgan::img {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& data) {
    put_u32(out, static_cast<uint32_t>(data.size()));
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = static_cast<uint32_t>(
        crc32(0, out.data() + start, static_cast<uInt>(out.size() - start)));
    put_u32(out, crc);
}

}  // namespace

std::vector<uint8_t> encode_png_gray(const GrayImage& image) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<size_t>(image.width * image.height))
        throw ValidationError("bad grayscale image dimensions");

    std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

    std::vector<uint8_t> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(image.width));
    put_u32(ihdr, static_cast<uint32_t>(image.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    put_chunk(out, "IHDR", ihdr);

    // filter byte 0 before each scanline
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>((image.width + 1) * image.height));
    for (int64_t y = 0; y < image.height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), image.pixels.begin() + y * image.width,
                   image.pixels.begin() + (y + 1) * image.width);
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> idat(bound);
    if (compress2(idat.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw NumericError("png deflate failed");
    idat.resize(bound);
    put_chunk(out, "IDAT", idat);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png_gray(const std::string& path, const GrayImage& image) {
    auto bytes = encode_png_gray(image);
    io::write_text(path, std::string(bytes.begin(), bytes.end()));
}

GrayImage make_grid(const Tensor& images, int64_t cols) {
    const auto& shape = images.shape();
    if (shape.size() != 4 || shape[1] != 1) throw ValidationError("make_grid wants [n,1,s,s]");
    if (cols < 1) throw ValidationError("make_grid needs at least one column");
    int64_t n = shape[0], s = shape[2];
    int64_t rows = (n + cols - 1) / cols;

    GrayImage grid;
    grid.width = cols * (s + 1) + 1;
    grid.height = rows * (s + 1) + 1;
    grid.pixels.assign(static_cast<size_t>(grid.width * grid.height), 32);

    for (int64_t i = 0; i < n; ++i) {
        int64_t r = i / cols, c = i % cols;
        int64_t oy = 1 + r * (s + 1), ox = 1 + c * (s + 1);
        const double* px = images.data() + i * s * s;
        for (int64_t y = 0; y < s; ++y)
            for (int64_t x = 0; x < s; ++x) {
                double v = std::clamp(px[y * s + x], -1.0, 1.0);
                grid.at(oy + y, ox + x) =
                    static_cast<uint8_t>(std::lround((v + 1.0) * 127.5));
            }
    }
    return grid;
}

}  // namespace ossgan::img

#include "cvl/png.hpp"

#include <array>
#include <fstream>

#include "cvl/error.hpp"

namespace cvl {

namespace {

uint32_t crc32(std::span<const uint8_t> data, uint32_t crc = 0) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t n = 0; n < 256; ++n) {
            uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    crc ^= 0xffffffffu;
    for (uint8_t b : data) crc = table[(crc ^ b) & 0xffu] ^ (crc >> 8);
    return crc ^ 0xffffffffu;
}

uint32_t adler32(std::span<const uint8_t> data) {
    uint32_t a = 1, b = 0;
    for (uint8_t byte : data) {
        a = (a + byte) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

void put_be32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4], std::span<const uint8_t> data) {
    put_be32(out, static_cast<uint32_t>(data.size()));
    const size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    put_be32(out, crc32({out.data() + crc_start, out.size() - crc_start}));
}

// zlib stream holding stored deflate blocks only.
std::vector<uint8_t> zlib_stored(std::span<const uint8_t> raw) {
    std::vector<uint8_t> z;
    z.reserve(raw.size() + raw.size() / 65535 * 5 + 16);
    z.push_back(0x78); // 32K window, deflate
    z.push_back(0x01);
    size_t pos = 0;
    do {
        const size_t len = std::min<size_t>(raw.size() - pos, 65535);
        const bool final = pos + len == raw.size();
        z.push_back(final ? 1 : 0);
        z.push_back(static_cast<uint8_t>(len & 0xff));
        z.push_back(static_cast<uint8_t>(len >> 8));
        z.push_back(static_cast<uint8_t>(~len & 0xff));
        z.push_back(static_cast<uint8_t>((~len >> 8) & 0xff));
        z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + len);
        pos += len;
    } while (pos < raw.size());
    put_be32(z, adler32(raw));
    return z;
}

std::vector<uint8_t> encode(uint32_t width, uint32_t height, uint8_t color_type,
                            uint32_t bytes_per_pixel, std::span<const uint8_t> pixels) {
    if (width == 0 || height == 0 ||
        pixels.size() != static_cast<size_t>(width) * height * bytes_per_pixel)
        fail(Err::DimsMismatch, "pixel buffer does not match image dimensions");

    std::vector<uint8_t> png = {137, 80, 78, 71, 13, 10, 26, 10};

    std::vector<uint8_t> ihdr;
    put_be32(ihdr, width);
    put_be32(ihdr, height);
    ihdr.push_back(8);          // bit depth
    ihdr.push_back(color_type); // 0 gray, 2 rgb
    ihdr.push_back(0);          // compression
    ihdr.push_back(0);          // filter
    ihdr.push_back(0);          // interlace
    put_chunk(png, "IHDR", ihdr);

    // filter byte 0 (None) per scanline
    std::vector<uint8_t> raw;
    const size_t stride = static_cast<size_t>(width) * bytes_per_pixel;
    raw.reserve((stride + 1) * height);
    for (uint32_t y = 0; y < height; ++y) {
        raw.push_back(0);
        raw.insert(raw.end(), pixels.begin() + y * stride, pixels.begin() + (y + 1) * stride);
    }
    put_chunk(png, "IDAT", zlib_stored(raw));
    put_chunk(png, "IEND", {});
    return png;
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(Err::Io, "short write to " + path);
}

} // namespace

std::vector<uint8_t> encode_png_gray8(uint32_t width, uint32_t height,
                                      std::span<const uint8_t> pixels) {
    return encode(width, height, 0, 1, pixels);
}

std::vector<uint8_t> encode_png_rgb8(uint32_t width, uint32_t height,
                                     std::span<const uint8_t> pixels) {
    return encode(width, height, 2, 3, pixels);
}

void write_png_gray8(const std::string& path, uint32_t width, uint32_t height,
                     std::span<const uint8_t> pixels) {
    write_file(path, encode_png_gray8(width, height, pixels));
}

void write_png_rgb8(const std::string& path, uint32_t width, uint32_t height,
                    std::span<const uint8_t> pixels) {
    write_file(path, encode_png_rgb8(width, height, pixels));
}

} // namespace cvl

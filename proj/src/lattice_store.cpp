#include "cvl/lattice_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "cvl/error.hpp"
#include "cvl/png.hpp"

namespace cvl {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Cursor {
    const uint8_t* p;
    const uint8_t* end;

    uint16_t u16() {
        uint16_t v = static_cast<uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        return v;
    }
    uint32_t u32() {
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    uint64_t u64() {
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
        p += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    float f32() { return std::bit_cast<float>(u32()); }
};

} // namespace

ContainerHeader ContainerHeader::from_spec(const GridSpec& spec, int32_t day) {
    ContainerHeader h;
    h.lat_min = spec.lat_min;
    h.lat_step = spec.lat_step;
    h.lon_min = spec.lon_min;
    h.lon_step = spec.lon_step;
    h.rows = spec.rows();
    h.cols = spec.cols();
    h.min_step = static_cast<uint16_t>(spec.min_step);
    h.dxn_step = static_cast<uint16_t>(spec.dxn_step);
    h.n_batches = spec.batches();
    h.day = day;
    return h;
}

uint64_t container_size_bytes(uint32_t rows, uint32_t cols, uint32_t n_batches) {
    const uint64_t plane = static_cast<uint64_t>(rows) * cols * 4;
    return ContainerHeader::kByteSize + static_cast<uint64_t>(n_batches) * (4 + 8 * plane);
}

uint64_t write_container(const std::vector<BatchFrame>& frames, const GridSpec& spec, int32_t day,
                         const std::string& path) {
    const uint32_t R = spec.rows(), C = spec.cols(), T = spec.batches();
    if (frames.size() != T)
        fail(Err::DimsMismatch, "expected " + std::to_string(T) + " frames, got " +
                                    std::to_string(frames.size()));
    const size_t cells = static_cast<size_t>(R) * C;
    for (uint32_t t = 0; t < T; ++t) {
        const BatchFrame& f = frames[t];
        if (f.t != t || f.rows != R || f.cols != C)
            fail(Err::DimsMismatch, "frame " + std::to_string(t) + " does not match grid");
        for (uint32_t d = 0; d < 4; ++d) {
            if (f.speed[d].size() != cells || f.volume[d].size() != cells)
                fail(Err::DimsMismatch, "frame " + std::to_string(t) + " plane size mismatch");
            for (float v : f.speed[d])
                if (!std::isfinite(v))
                    fail(Err::NonFiniteValue,
                         "NaN/Inf in speed plane of batch " + std::to_string(t));
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::Io, "cannot open " + path + " for writing");

    std::vector<uint8_t> buf;
    buf.reserve(ContainerHeader::kByteSize);
    buf.insert(buf.end(), ContainerHeader::kMagic, ContainerHeader::kMagic + 4);
    put_u16(buf, ContainerHeader::kVersion);
    put_f64(buf, spec.lat_min);
    put_f64(buf, spec.lat_step);
    put_f64(buf, spec.lon_min);
    put_f64(buf, spec.lon_step);
    put_u32(buf, R);
    put_u32(buf, C);
    put_u16(buf, static_cast<uint16_t>(spec.min_step));
    put_u16(buf, static_cast<uint16_t>(spec.dxn_step));
    put_u32(buf, T);
    put_u32(buf, static_cast<uint32_t>(day));
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));

    uint64_t written = buf.size();
    for (uint32_t t = 0; t < T; ++t) {
        buf.clear();
        buf.reserve(4 + 8 * cells * 4);
        put_u32(buf, t);
        for (uint32_t d = 0; d < 4; ++d)
            for (float v : frames[t].speed[d]) put_u32(buf, std::bit_cast<uint32_t>(v));
        for (uint32_t d = 0; d < 4; ++d)
            for (uint32_t v : frames[t].volume[d]) put_u32(buf, v);
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
        written += buf.size();
    }
    out.flush();
    if (!out) fail(Err::Io, "short write to " + path);
    return written;
}

std::pair<ContainerHeader, std::vector<BatchFrame>> read_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::Io, "cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());

    if (bytes.size() < ContainerHeader::kByteSize)
        fail(Err::TruncatedFile, path + " is smaller than the header");
    if (std::memcmp(bytes.data(), ContainerHeader::kMagic, 4) != 0)
        fail(Err::BadMagic, path);

    Cursor cur{bytes.data() + 4, bytes.data() + bytes.size()};
    ContainerHeader h;
    h.version = cur.u16();
    if (h.version != ContainerHeader::kVersion)
        fail(Err::VersionUnsupported, "version " + std::to_string(h.version));
    h.lat_min = cur.f64();
    h.lat_step = cur.f64();
    h.lon_min = cur.f64();
    h.lon_step = cur.f64();
    h.rows = cur.u32();
    h.cols = cur.u32();
    h.min_step = cur.u16();
    h.dxn_step = cur.u16();
    h.n_batches = cur.u32();
    h.day = static_cast<int32_t>(cur.u32());

    if (bytes.size() != container_size_bytes(h.rows, h.cols, h.n_batches))
        fail(Err::TruncatedFile, path + ": size " + std::to_string(bytes.size()) +
                                     " violates the container size formula");

    const size_t cells = static_cast<size_t>(h.rows) * h.cols;
    std::vector<BatchFrame> frames(h.n_batches);
    for (uint32_t t = 0; t < h.n_batches; ++t) {
        BatchFrame& f = frames[t];
        const uint32_t index = cur.u32();
        if (index != t)
            fail(Err::TruncatedFile,
                 path + ": batch_index " + std::to_string(index) + " out of order");
        f.t = index;
        f.rows = h.rows;
        f.cols = h.cols;
        for (uint32_t d = 0; d < 4; ++d) {
            f.speed[d].resize(cells);
            for (size_t i = 0; i < cells; ++i) f.speed[d][i] = cur.f32();
        }
        for (uint32_t d = 0; d < 4; ++d) {
            f.volume[d].resize(cells);
            for (size_t i = 0; i < cells; ++i) f.volume[d][i] = cur.u32();
        }
    }
    return {h, std::move(frames)};
}

namespace {

// storage keeps row 0 at lat_min (south); images want north on top
template <typename T>
std::vector<T> flip_rows(const std::vector<T>& plane, uint32_t rows, uint32_t cols,
                         uint32_t channels = 1) {
    std::vector<T> out(plane.size());
    const size_t stride = static_cast<size_t>(cols) * channels;
    for (uint32_t r = 0; r < rows; ++r)
        std::copy_n(plane.begin() + static_cast<size_t>(r) * stride, stride,
                    out.begin() + static_cast<size_t>(rows - 1 - r) * stride);
    return out;
}

} // namespace

void render_channel(const BatchFrame& frame, uint32_t channel, const NormalizationSpec& norm,
                    const std::string& path) {
    if (channel >= 8) fail(Err::BadChannel, "channel " + std::to_string(channel) + " not in [0,8)");
    std::vector<uint8_t> pixels =
        channel < 4 ? normalize_speed(frame.speed[channel], norm)
                    : normalize_volume(frame.volume[channel - 4], norm);
    pixels = flip_rows(pixels, frame.rows, frame.cols);
    write_png_gray8(path, frame.cols, frame.rows, pixels);
}

void render_composite(const BatchFrame& frame, const NormalizationSpec& norm,
                      const std::string& path) {
    const size_t cells = static_cast<size_t>(frame.rows) * frame.cols;

    std::vector<uint32_t> total_volume(cells, 0);
    for (uint32_t d = 0; d < 4; ++d)
        for (size_t i = 0; i < cells; ++i) total_volume[i] += frame.volume[d][i];
    const std::vector<uint8_t> g_plane = normalize_volume(total_volume, norm);

    std::vector<uint8_t> rgb(cells * 3, 0);
    for (size_t i = 0; i < cells; ++i) {
        if (total_volume[i] == 0) continue; // empty cells stay (0,0,0)

        double weighted = 0.0;
        uint32_t best_d = 0;
        uint32_t best_vol = frame.volume[0][i];
        for (uint32_t d = 0; d < 4; ++d) {
            weighted += static_cast<double>(frame.speed[d][i]) * frame.volume[d][i];
            if (frame.volume[d][i] > best_vol) { // ties resolve to the lowest index
                best_vol = frame.volume[d][i];
                best_d = d;
            }
        }
        rgb[i * 3 + 0] = quantize_speed(weighted / total_volume[i], norm);
        rgb[i * 3 + 1] = g_plane[i];
        rgb[i * 3 + 2] = static_cast<uint8_t>(best_d * 85);
    }
    rgb = flip_rows(rgb, frame.rows, frame.cols, 3);
    write_png_rgb8(path, frame.cols, frame.rows, rgb);
}

} // namespace cvl

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cvl/aggregate.hpp"
#include "cvl/grid.hpp"
#include "cvl/normalize.hpp"

namespace cvl {

// Day-level container: fixed 58-byte header, then n_batches blocks of
// (batch_index u32, 8 planes in channel order speed[N,E,S,W] f32 then
// volume[N,E,S,W] u32), each plane row-major R x C with row 0 at lat_min.
// Everything little-endian. File size is exactly
//   58 + n_batches * (4 + 8 * R * C * 4).
struct ContainerHeader {
    static constexpr char kMagic[4] = {'C', 'V', 'L', '1'};
    static constexpr uint16_t kVersion = 1;
    static constexpr uint64_t kByteSize = 58;

    uint16_t version = kVersion;
    double lat_min = 0.0;
    double lat_step = 0.0;
    double lon_min = 0.0;
    double lon_step = 0.0;
    uint32_t rows = 0;
    uint32_t cols = 0;
    uint16_t min_step = 0;
    uint16_t dxn_step = 0;
    uint32_t n_batches = 0;
    int32_t day = 0; // days since 1970-01-01

    static ContainerHeader from_spec(const GridSpec& spec, int32_t day);
};

uint64_t container_size_bytes(uint32_t rows, uint32_t cols, uint32_t n_batches);

// Returns the exact byte count written. Throws DimsMismatch when frames do
// not match the spec, NonFiniteValue when a speed plane holds NaN/Inf.
uint64_t write_container(const std::vector<BatchFrame>& frames, const GridSpec& spec, int32_t day,
                         const std::string& path);

// read(write(x)) reproduces x bit-exactly. Throws BadMagic /
// VersionUnsupported / TruncatedFile.
std::pair<ContainerHeader, std::vector<BatchFrame>> read_container(const std::string& path);

// Channels 0..3: mean speed N,E,S,W; 4..7: unique volume N,E,S,W.
// 8-bit grayscale PNG, width C, height R, flipped so north is at the top.
void render_channel(const BatchFrame& frame, uint32_t channel, const NormalizationSpec& norm,
                    const std::string& path);

// RGB composite: R = volume-weighted mean speed, G = total volume,
// B = dominant direction index * 85 (ties to the lowest index).
void render_composite(const BatchFrame& frame, const NormalizationSpec& norm,
                      const std::string& path);

} // namespace cvl

#include "cvl/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "cvl/error.hpp"

namespace cvl {

const char* to_string(VolumeMode mode) {
    switch (mode) {
    case VolumeMode::PerFrameMinMax: return "per_frame_minmax";
    case VolumeMode::FixedCap: return "fixed_cap";
    case VolumeMode::Log1p: return "log1p";
    }
    return "unknown";
}

VolumeMode volume_mode_from_string(const std::string& name) {
    if (name == "per_frame_minmax") return VolumeMode::PerFrameMinMax;
    if (name == "fixed_cap") return VolumeMode::FixedCap;
    if (name == "log1p") return VolumeMode::Log1p;
    fail(Err::BadConfig, "unknown volume mode '" + name + "'");
}

int64_t round_half_away(double v) {
    // std::round rounds halfway cases away from zero, which is the stated rule
    return static_cast<int64_t>(std::round(v));
}

namespace {

uint8_t to_u8(double q) {
    const int64_t v = round_half_away(q);
    return static_cast<uint8_t>(std::clamp<int64_t>(v, 0, 255));
}

} // namespace

uint8_t quantize_speed(double v, const NormalizationSpec& spec) {
    const double clamped = std::clamp(v, 0.0, spec.speed_max);
    return to_u8(clamped / spec.speed_max * 255.0);
}

std::vector<uint8_t> normalize_speed(std::span<const float> plane, const NormalizationSpec& spec) {
    std::vector<uint8_t> out(plane.size());
    for (size_t i = 0; i < plane.size(); ++i)
        out[i] = quantize_speed(static_cast<double>(plane[i]), spec);
    return out;
}

std::vector<uint8_t> normalize_volume(std::span<const uint32_t> plane,
                                      const NormalizationSpec& spec) {
    std::vector<uint8_t> out(plane.size(), 0);
    if (plane.empty()) return out;

    switch (spec.volume_mode) {
    case VolumeMode::PerFrameMinMax: {
        const auto [lo_it, hi_it] = std::minmax_element(plane.begin(), plane.end());
        const uint32_t lo = *lo_it, hi = *hi_it;
        if (hi == lo) return out; // degenerate frame stays all-zero
        for (size_t i = 0; i < plane.size(); ++i)
            out[i] = to_u8(static_cast<double>(plane[i] - lo) / static_cast<double>(hi - lo) *
                           255.0);
        return out;
    }
    case VolumeMode::FixedCap: {
        for (size_t i = 0; i < plane.size(); ++i) {
            const double n = std::min(static_cast<double>(plane[i]), spec.volume_cap);
            out[i] = to_u8(n / spec.volume_cap * 255.0);
        }
        return out;
    }
    case VolumeMode::Log1p: {
        const uint32_t hi = *std::max_element(plane.begin(), plane.end());
        if (hi == 0) return out;
        const double denom = std::log1p(static_cast<double>(hi));
        for (size_t i = 0; i < plane.size(); ++i)
            out[i] = to_u8(std::log1p(static_cast<double>(plane[i])) / denom * 255.0);
        return out;
    }
    }
    return out;
}

} // namespace cvl

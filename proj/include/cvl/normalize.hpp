#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cvl {

enum class VolumeMode {
    PerFrameMinMax, // best contrast per frame
    FixedCap,       // comparable across frames; recommended for model input
    Log1p,
};

const char* to_string(VolumeMode mode);
VolumeMode volume_mode_from_string(const std::string& name); // throws BadConfig

struct NormalizationSpec {
    double speed_max = 128.0; // fixed global scale so frames compare across a day
    VolumeMode volume_mode = VolumeMode::PerFrameMinMax;
    double volume_cap = 50.0; // used by FixedCap

    bool operator==(const NormalizationSpec&) const = default;
};

// Rounding is half-away-from-zero everywhere in this module.
int64_t round_half_away(double v);

uint8_t quantize_speed(double v, const NormalizationSpec& spec);

std::vector<uint8_t> normalize_speed(std::span<const float> plane, const NormalizationSpec& spec);
std::vector<uint8_t> normalize_volume(std::span<const uint32_t> plane,
                                      const NormalizationSpec& spec);

} // namespace cvl

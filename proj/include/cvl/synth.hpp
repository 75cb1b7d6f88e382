#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvl/records.hpp"

namespace cvl {

// Deterministic stream: splitmix64 core with uniform / gaussian draws
// implemented here so output does not depend on the standard library's
// distribution internals.
struct SynthRng {
    uint64_t state;

    explicit SynthRng(uint64_t seed) : state(seed) {}

    uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double gauss(double sigma);             // Box-Muller, no cached spare
};

struct SynthConfig {
    uint64_t seed = 0;
    uint32_t n_journeys = 100;
    // bbox defaults match GridSpec defaults
    double lat_min = 36.0;
    double lat_max = 40.6;
    double lon_min = -95.8;
    double lon_max = -89.1;
    double sample_period = 1.0;   // seconds between samples; 0.05 supported
    double mean_duration = 300.0; // seconds per journey
    double speed_min = 0.0;
    double speed_max = 130.0;     // source units; keeps defaults under the filter ceiling
    double heading_sigma = 6.0;   // degrees of heading drift per step
    uint32_t n_shards = 8;
    std::string day = "2021-05-09";
    std::string out_dir;
};

struct JourneyState {
    double time_sec = 0.0; // seconds into the day
    double latitude = 0.0;
    double longitude = 0.0;
    double speed = 0.0;
    double heading = 0.0;
};

// Advance one sample_period: wrapped-gaussian heading walk, mean-reverting
// speed walk, position integration with boundary reflection.
JourneyState step_journey(const JourneyState& state, const SynthConfig& config, SynthRng& rng);

// Emit a journey's records (timestamps rendered at second resolution, so
// sub-second sampling produces duplicate keys on purpose).
std::vector<CvRecord> generate_journey(uint32_t journey_index, const SynthConfig& config);

// Write the day's shards (journeys round-robin across files) and return a
// manifest of what was written. Byte-identical for identical configs.
SourceManifest generate_day(const SynthConfig& config);

} // namespace cvl

#include "cvl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "cvl/error.hpp"
#include "cvl/ingest.hpp"

namespace fs = std::filesystem;

namespace cvl {

uint64_t SynthRng::next_u64() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SynthRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SynthRng::gauss(double sigma) {
    // Box-Muller; draw until u1 > 0 so log() stays finite
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

// Per-journey substream: generation order and shard count cannot change what
// any single journey produces.
uint64_t journey_seed(uint64_t seed, uint32_t journey_index) {
    SynthRng mix(seed ^ (0xa0761d6478bd642full + journey_index));
    mix.next_u64();
    return mix.next_u64();
}

double wrap_heading(double h) {
    h = std::fmod(h, 360.0);
    if (h < 0.0) h += 360.0;
    return h;
}

// degrees of travel per (speed unit * second); ~60 units moves a few cells
// per minute on a 0.01-degree grid
constexpr double kDegreesPerUnitSecond = 4.0e-6;

// margin keeps 6-decimal rendering inside the bbox
constexpr double kEdgeMargin = 1e-6;

double reflect(double x, double lo, double hi, bool& bounced) {
    if (x < lo) {
        x = lo + (lo - x);
        bounced = true;
    }
    if (x > hi) {
        x = hi - (x - hi);
        bounced = true;
    }
    return std::clamp(x, lo, hi);
}

} // namespace

JourneyState step_journey(const JourneyState& state, const SynthConfig& config, SynthRng& rng) {
    JourneyState next = state;
    next.time_sec = state.time_sec + config.sample_period;

    next.heading = wrap_heading(state.heading + rng.gauss(config.heading_sigma));

    // mean-reverting toward 60% of the speed ceiling
    const double target = config.speed_min + 0.6 * (config.speed_max - config.speed_min);
    next.speed = state.speed + 0.05 * (target - state.speed) + rng.gauss(1.5);
    next.speed = std::clamp(next.speed, config.speed_min, config.speed_max);

    const double rad = next.heading * std::numbers::pi / 180.0;
    const double dist = next.speed * config.sample_period * kDegreesPerUnitSecond;
    double lat = state.latitude + dist * std::cos(rad); // heading 0 = north
    double lon = state.longitude + dist * std::sin(rad);

    bool bounced_lat = false, bounced_lon = false;
    lat = reflect(lat, config.lat_min + kEdgeMargin, config.lat_max - kEdgeMargin, bounced_lat);
    lon = reflect(lon, config.lon_min + kEdgeMargin, config.lon_max - kEdgeMargin, bounced_lon);
    if (bounced_lat) next.heading = wrap_heading(180.0 - next.heading);
    if (bounced_lon) next.heading = wrap_heading(360.0 - next.heading);
    next.latitude = lat;
    next.longitude = lon;
    return next;
}

std::vector<CvRecord> generate_journey(uint32_t journey_index, const SynthConfig& config) {
    SynthRng rng(journey_seed(config.seed, journey_index));

    const auto day = Timestamp::parse_day(config.day);
    if (!day) fail(Err::BadConfig, "bad day '" + config.day + "'");
    const int64_t day_start = static_cast<int64_t>(*day) * 86400;

    JourneyState state;
    state.time_sec = rng.uniform(0.0, 86400.0);
    state.latitude = rng.uniform(config.lat_min + kEdgeMargin, config.lat_max - kEdgeMargin);
    state.longitude = rng.uniform(config.lon_min + kEdgeMargin, config.lon_max - kEdgeMargin);
    state.speed = rng.uniform(config.speed_min, config.speed_max);
    state.heading = rng.uniform(0.0, 360.0);

    const double duration = config.mean_duration * rng.uniform(0.3, 1.7);
    const uint64_t steps = static_cast<uint64_t>(duration / config.sample_period);

    char id[24];
    std::snprintf(id, sizeof(id), "j%06u", journey_index);

    std::vector<CvRecord> records;
    records.reserve(steps + 1);
    const double start = state.time_sec;
    for (uint64_t k = 0; k <= steps; ++k) {
        // start + k*period, not accumulated sums: repeated addition drifts
        // rendered seconds off by one over long journeys
        state.time_sec = start + static_cast<double>(k) * config.sample_period;
        if (state.time_sec >= 86400.0) break; // clip at day end
        CvRecord rec;
        rec.journey_id = id;
        rec.timestamp = Timestamp{day_start + static_cast<int64_t>(state.time_sec)};
        rec.latitude = state.latitude;
        rec.longitude = state.longitude;
        rec.postal_code = "65101";
        rec.speed = state.speed;
        rec.heading = state.heading;
        records.push_back(std::move(rec));
        state = step_journey(state, config, rng);
    }
    return records;
}

SourceManifest generate_day(const SynthConfig& config) {
    if (config.n_shards == 0) fail(Err::BadConfig, "n_shards must be >= 1");
    if (!(config.sample_period > 0.0)) fail(Err::BadConfig, "sample_period must be > 0");
    if (config.out_dir.empty()) fail(Err::BadConfig, "output directory not set");

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) fail(Err::Io, config.out_dir + ": " + ec.message());

    SourceManifest manifest;
    char line[256];
    for (uint32_t s = 0; s < config.n_shards; ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "shard_%04u.csv", s);
        const std::string path = (fs::path(config.out_dir) / name).string();

        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail(Err::Io, "cannot open " + path + " for writing");
        out << csv_header() << "\n";

        for (uint32_t j = s; j < config.n_journeys; j += config.n_shards) {
            for (const CvRecord& rec : generate_journey(j, config)) {
                // fixed decimal rendering keeps output byte-stable
                std::snprintf(line, sizeof(line), "%s,%s,%.6f,%.6f,%s,%.2f,%.2f\n",
                              rec.journey_id.c_str(), rec.timestamp.to_string().c_str(),
                              rec.latitude, rec.longitude, rec.postal_code.c_str(), rec.speed,
                              rec.heading);
                out << line;
                ++manifest.total_rows;
            }
        }
        if (!out) fail(Err::Io, "short write to " + path);
        manifest.shard_paths.push_back(path);
    }
    std::sort(manifest.shard_paths.begin(), manifest.shard_paths.end());
    return manifest;
}

} // namespace cvl

// Acceptance suite: each criterion prints one [PASS]/[FAIL]/[SKIP] line.
// Run with no arguments for the full suite, or with a criterion number.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvl/aggregate.hpp"
#include "cvl/bench.hpp"
#include "cvl/cli.hpp"
#include "cvl/grid.hpp"
#include "cvl/ingest.hpp"
#include "cvl/lattice_store.hpp"
#include "cvl/normalize.hpp"
#include "cvl/synth.hpp"

using namespace cvl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* status, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", status, criterion, what.c_str());
    std::fflush(stdout);
    if (std::strcmp(status, "FAIL") == 0) ++g_failures;
}

struct TempTree {
    fs::path root;
    explicit TempTree(const std::string& tag) {
        root = fs::temp_directory_path() / ("cvl_accept_" + tag);
        fs::remove_all(root);
        fs::create_directories(root);
    }
    ~TempTree() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }
    std::string sub(const std::string& name) const { return (root / name).string(); }
};

GridSpec coarse_grid() {
    GridSpec spec; // default Missouri-style box
    spec.lat_step = 0.25;
    spec.lon_step = 0.25;
    return spec;
}

GridSpec degenerate_grid() {
    GridSpec spec;
    spec.lat_step = 10.0;
    spec.lon_step = 10.0; // 1 x 1
    return spec;
}

GridSpec grid_10x20() {
    GridSpec spec;
    spec.lat_min = 36.0;
    spec.lat_max = 36.1;
    spec.lon_min = -93.0;
    spec.lon_max = -92.8;
    spec.lat_step = 0.01;
    spec.lon_step = 0.01;
    return spec;
}

SourceManifest synth_day(uint64_t seed, uint32_t journeys, const std::string& dir,
                         double mean_duration = 240.0) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_journeys = journeys;
    cfg.n_shards = 8;
    cfg.mean_duration = mean_duration;
    cfg.out_dir = dir;
    return generate_day(cfg);
}

std::vector<std::pair<CvRecord, RecordProvenance>> read_raw(const SourceManifest& manifest) {
    std::vector<std::pair<CvRecord, RecordProvenance>> raw;
    for (const auto& path : manifest.shard_paths) {
        ShardData shard = read_shard(path);
        for (size_t k = 0; k < shard.records.size(); ++k)
            raw.emplace_back(std::move(shard.records[k]),
                             RecordProvenance{path, shard.line_numbers[k]});
    }
    return raw;
}

// "" on success, else a description of the first divergence.
std::string compare_days(const std::vector<BatchFrame>& expected,
                         const std::vector<BatchFrame>& actual, double speed_rel_tol) {
    if (expected.size() != actual.size()) return "batch count differs";
    for (size_t t = 0; t < expected.size(); ++t) {
        for (uint32_t d = 0; d < 4; ++d) {
            if (expected[t].volume[d] != actual[t].volume[d])
                return "volume plane differs at t=" + std::to_string(t);
            if (expected[t].raw_count[d] != actual[t].raw_count[d])
                return "raw count plane differs at t=" + std::to_string(t);
            for (size_t i = 0; i < expected[t].speed[d].size(); ++i) {
                const double a = expected[t].speed[d][i];
                const double b = actual[t].speed[d][i];
                const double denom = std::max(std::abs(a), std::abs(b));
                if (denom == 0.0) continue;
                if (std::abs(a - b) / denom > speed_rel_tol)
                    return "speed differs at t=" + std::to_string(t) +
                           " beyond rel tol: " + std::to_string(a) + " vs " + std::to_string(b);
            }
        }
    }
    return "";
}

std::vector<uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 1. Oracle equivalence over 20 randomized synthetic days, two grids
// (coarse Missouri box and a degenerate 1x1), 10k-100k records each:
// integer planes bit-exact, speed planes within 1e-9 relative.
void criterion_1() {
    uint64_t total_records = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        TempTree tree("c1_" + std::to_string(seed));
        // scale journeys so days span roughly 10k..100k records
        const uint32_t journeys = static_cast<uint32_t>(60 + seed * 16);
        const SourceManifest manifest = synth_day(seed, journeys, tree.sub("day"));
        if (manifest.total_rows < 10000 || manifest.total_rows > 100000) {
            report(1, "FAIL",
                   "day size " + std::to_string(manifest.total_rows) + " outside 10k..100k");
            return;
        }
        total_records += manifest.total_rows;

        const GridSpec spec = (seed % 2 == 0) ? coarse_grid() : degenerate_grid();
        const auto raw = read_raw(manifest);
        const auto oracle = oracle_pipeline(raw, spec, FilterRules{});
        const auto pipeline =
            run_pipeline(manifest, spec, FilterRules{}, /*partitions*/ 7, /*threads*/ 0);

        const std::string diff = compare_days(oracle, pipeline, 1e-9);
        if (!diff.empty()) {
            report(1, "FAIL", "seed " + std::to_string(seed) + ": " + diff);
            return;
        }
    }
    report(1, "PASS",
           "oracle equivalence on 20 synthetic days (" + std::to_string(total_records) +
               " records, coarse + degenerate grids, speed rel tol 1e-9)");
}

// 2. Partition invariance: containers from n_partitions {1,2,4,16} and a
// shuffled shard order are byte-identical.
void criterion_2() {
    TempTree tree("c2");
    const SourceManifest manifest = synth_day(99, 400, tree.sub("day"), 250.0);
    const GridSpec spec = coarse_grid();

    const std::string reference = tree.sub("p1.cvl1");
    write_container(run_pipeline(manifest, spec, FilterRules{}, 1), spec, 18756, reference);
    const auto reference_bytes = slurp(reference);

    for (uint32_t partitions : {2u, 4u, 16u}) {
        const std::string path = tree.sub("p" + std::to_string(partitions) + ".cvl1");
        write_container(run_pipeline(manifest, spec, FilterRules{}, partitions), spec, 18756,
                        path);
        if (slurp(path) != reference_bytes) {
            report(2, "FAIL",
                   "container differs for n_partitions=" + std::to_string(partitions));
            return;
        }
    }

    SourceManifest shuffled = manifest;
    std::mt19937_64 rng(13);
    std::shuffle(shuffled.shard_paths.begin(), shuffled.shard_paths.end(), rng);
    const std::string shuffled_path = tree.sub("shuffled.cvl1");
    write_container(run_pipeline(shuffled, spec, FilterRules{}, 4), spec, 18756, shuffled_path);
    if (slurp(shuffled_path) != reference_bytes) {
        report(2, "FAIL", "container differs under shuffled shard order");
        return;
    }

    report(2, "PASS",
           "byte-identical containers for n_partitions {1,2,4,16} and shuffled shards (" +
               std::to_string(manifest.total_rows) + "-record day)");
}

// 3. Structural constants: 288 batches of 8 planes; container size obeys
// 58 + 288*(4 + 8*R*C*4) exactly (R=10, C=20 -> 1,844,410).
void criterion_3() {
    TempTree tree("c3");
    const GridSpec spec = grid_10x20();
    if (spec.rows() != 10 || spec.cols() != 20 || spec.batches() != 288) {
        report(3, "FAIL", "grid dims are not 10x20x288");
        return;
    }

    SynthConfig synth;
    synth.seed = 5;
    synth.n_journeys = 25;
    synth.lat_min = spec.lat_min;
    synth.lat_max = spec.lat_max;
    synth.lon_min = spec.lon_min;
    synth.lon_max = spec.lon_max;
    synth.out_dir = tree.sub("day");
    const SourceManifest manifest = generate_day(synth);

    const auto frames = run_pipeline(manifest, spec, FilterRules{}, 4);
    if (frames.size() != 288) {
        report(3, "FAIL", "pipeline produced " + std::to_string(frames.size()) + " batches");
        return;
    }
    for (const auto& frame : frames) {
        size_t planes = 0;
        for (uint32_t d = 0; d < 4; ++d) {
            if (!frame.speed[d].empty()) ++planes;
            if (!frame.volume[d].empty()) ++planes;
        }
        if (planes != 8) {
            report(3, "FAIL", "batch " + std::to_string(frame.t) + " does not hold 8 planes");
            return;
        }
    }

    const std::string path = tree.sub("day.cvl1");
    const uint64_t bytes = write_container(frames, spec, 18756, path);
    const uint64_t expected = 58 + 288ull * (4 + 8ull * 10 * 20 * 4);
    if (bytes != 1844410 || bytes != expected || fs::file_size(path) != expected ||
        container_size_bytes(10, 20, 288) != expected) {
        report(3, "FAIL", "container size " + std::to_string(bytes) + " != 1844410");
        return;
    }
    report(3, "PASS", "288 batches x 8 planes; container size exactly 1,844,410 bytes");
}

// 4. Golden values from the published snapshot rows.
void criterion_4() {
    const char* rows[] = {
        "33456rd,2021-05-09 03:48:42,37.664087,-92.6546,65536,105.98,33",
        "31224tf,2021-05-09 03:49:42,37.667707,-92.6490,65536,0,53",
        "22124fs,2021-05-09 03:49:49,37.690978,-92.6490,65536,48.38,33",
        "33456rd,2021-05-09 03:48:42,37.664087,-92.6546,65536,105.98,33",
    };
    const auto cols = *parse_header(csv_header());
    std::vector<std::pair<CvRecord, RecordProvenance>> raw;
    for (int i = 0; i < 4; ++i) {
        const auto parsed = parse_record(rows[i], cols);
        if (!std::holds_alternative<CvRecord>(parsed)) {
            report(4, "FAIL", "snapshot row " + std::to_string(i) + " failed to parse");
            return;
        }
        raw.emplace_back(std::get<CvRecord>(parsed), RecordProvenance{"snap.csv", i + 1});
    }

    const auto deduped = deduplicate(raw);
    if (deduped.size() != 3) {
        report(4, "FAIL", "dedup kept " + std::to_string(deduped.size()) + " rows, expected 3");
        return;
    }

    const GridSpec spec = degenerate_grid(); // one spatial cell
    PartialAggregate partial(spec);
    for (const auto& rec : deduped) partial.accumulate(rec);
    const BatchFrame frame = partial.finalize_batch(45);
    const double mean = frame.speed[0][0];
    const uint32_t volume = frame.volume[0][0];

    const uint32_t tbin = time_bin(*Timestamp::parse("2021-05-09 03:48:42"), spec);
    const uint32_t dbin = dxn_bin(33.0, spec);

    if (volume != 3) {
        report(4, "FAIL", "cell volume " + std::to_string(volume) + " != 3");
    } else if (std::abs(mean - 51.45333) > 1e-5) {
        report(4, "FAIL", "mean speed " + std::to_string(mean) + " not within 1e-5 of 51.45333");
    } else if (tbin != 45) {
        report(4, "FAIL", "time_bin(03:48:42, 5) = " + std::to_string(tbin) + " != 45");
    } else if (dbin != 0) {
        report(4, "FAIL", "dxn_bin(33) = " + std::to_string(dbin) + " != 0");
    } else {
        report(4, "PASS",
               "dedup 3/4, volume 3, mean 51.45333 (±1e-5), time_bin 45, dxn_bin 0");
    }
}

// 5. Report-shape reproduction: bench --runs 25 renders Avg/Min/Max/StdDev
// per stage plus Speedup; the published Overall numbers print 70.293.
void criterion_5() {
    TempTree tree("c5");
    const std::string data = tree.sub("day");
    if (cli_main({"synth", "--seed", "2", "--journeys", "6", "--mean-duration", "40", "--out",
                  data}) != 0) {
        report(5, "FAIL", "synth command failed");
        return;
    }
    const std::string report_path = tree.sub("report.md");
    if (cli_main({"bench", "--input", data, "--runs", "25", "--out", report_path}) != 0) {
        report(5, "FAIL", "bench command failed");
        return;
    }

    std::ifstream in(report_path);
    std::string header;
    std::getline(in, header);
    for (const char* column : {"Serial Avg", "Serial Min", "Serial Max", "Serial StdDev",
                               "Parallel Avg", "Parallel Min", "Parallel Max",
                               "Parallel StdDev", "Speedup"}) {
        if (header.find(column) == std::string::npos) {
            report(5, "FAIL", std::string("report header lacks column '") + column + "'");
            return;
        }
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line.find("---") == std::string::npos) lines.push_back(line);
    for (const char* op : {"Data Binning", "Indexing - Latitude", "Indexing - Longitude",
                           "Normalization", "Data Export", "Reduction - Count",
                           "Reduction - Sum", "Filter", "Overall"}) {
        const bool found = std::any_of(lines.begin(), lines.end(), [&](const std::string& l) {
            return l.find(op) != std::string::npos;
        });
        if (!found) {
            report(5, "FAIL", std::string("report lacks a '") + op + "' row");
            return;
        }
    }
    if (lines.size() != 13) {
        report(5, "FAIL", "expected 13 data rows, found " + std::to_string(lines.size()));
        return;
    }

    // fixture: the paper's Overall averages must print 70.293 +- 0.001
    RunStats cpu, gpu;
    cpu.avg = cpu.min = cpu.max = 149115.733;
    cpu.n_runs = gpu.n_runs = 25;
    gpu.avg = gpu.min = gpu.max = 2121.342;
    SpeedupReport fixture;
    fixture.rows.push_back({"Overall", "", cpu, gpu, speedup(cpu, gpu)});
    const std::string text = emit_report(fixture, ReportFormat::Markdown);
    const size_t tail = text.rfind("| ");
    const size_t close = text.rfind(" |");
    const double printed = std::stod(text.substr(tail + 2, close - tail - 2));
    if (std::abs(printed - 70.293) > 0.001) {
        report(5, "FAIL", "fixture speedup printed " + std::to_string(printed));
        return;
    }
    report(5, "PASS",
           "25-run report has Avg/Min/Max/StdDev + Speedup for all 13 rows; fixture prints " +
               std::to_string(printed));
}

// 6. Desk-scale performance property (needs >= 4 cores and ~5M records):
// parallel pipeline >= 3x the naive serial baseline, averaged over 5 runs.
void criterion_6() {
    const uint32_t cores = default_thread_count();
    const bool full_scale = cores >= 4;

    TempTree tree("c6");
    SynthConfig synth;
    synth.seed = 6;
    synth.mean_duration = 500.0;
    synth.n_journeys = full_scale ? 10000 : 600;
    synth.out_dir = tree.sub("day");
    const SourceManifest manifest = generate_day(synth);
    const GridSpec spec; // default 0.1-degree box

    const uint32_t runs = full_scale ? 5 : 3;
    const auto baseline = time_repeated(
        [&] {
            const auto raw = read_raw(manifest);
            const auto frames = oracle_pipeline(raw, spec, FilterRules{});
            if (frames.size() != 288) throw std::runtime_error("bad frame count");
        },
        runs);
    const auto optimized = time_repeated(
        [&] {
            const auto frames = run_pipeline(manifest, spec, FilterRules{}, cores * 3, cores);
            if (frames.size() != 288) throw std::runtime_error("bad frame count");
        },
        runs);
    const double ratio = speedup(baseline, optimized);

    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "%llu records, %u cores: serial %.2fs vs parallel %.2fs, speedup %.2fx",
                  static_cast<unsigned long long>(manifest.total_rows), cores, baseline.avg,
                  optimized.avg, ratio);

    if (full_scale) {
        if (ratio >= 3.0)
            report(6, "PASS", std::string(detail) + " (>= 3x required)");
        else
            report(6, "FAIL", std::string(detail) + " (>= 3x required)");
        return;
    }

    // precondition unmet on this machine; run the sanity floor instead
    if (ratio >= 0.9)
        report(6, "SKIP",
               std::string(detail) +
                   " — 3x check needs >= 4 cores; sanity floor (not >10% slower) holds");
    else
        report(6, "FAIL",
               std::string(detail) + " — parallel pipeline is >10% slower than naive serial");
}

// 7. Round trips: bitwise container read/write; normalization monotonicity
// and range on 1000 random planes; exhaustive index round trip on 4x4x8x8.
void criterion_7() {
    TempTree tree("c7");

    // container: a full random day (288 frames, superset of 50)
    GridSpec spec = grid_10x20();
    std::mt19937_64 rng(77);
    std::vector<BatchFrame> frames;
    for (uint32_t t = 0; t < spec.batches(); ++t) {
        BatchFrame frame = BatchFrame::zeros(t, spec);
        for (uint32_t d = 0; d < 4; ++d)
            for (size_t i = 0; i < frame.speed[d].size(); ++i)
                if (rng() % 3 == 0) {
                    frame.volume[d][i] = static_cast<uint32_t>(rng() % 1000);
                    frame.speed[d][i] = static_cast<float>(rng() % 100000) / 391.0f;
                }
        frames.push_back(std::move(frame));
    }
    const std::string path = tree.sub("random.cvl1");
    write_container(frames, spec, 12345, path);
    const auto [header, loaded] = read_container(path);
    for (size_t t = 0; t < frames.size(); ++t) {
        if (!frames[t].bitwise_equal(loaded[t])) {
            report(7, "FAIL", "container round trip differs at batch " + std::to_string(t));
            return;
        }
    }

    // normalization properties over 1000 random planes
    NormalizationSpec norm;
    for (int trial = 0; trial < 1000; ++trial) {
        norm.volume_mode = static_cast<VolumeMode>(trial % 3);
        const size_t n = 1 + rng() % 256;
        std::vector<float> speeds(n);
        std::vector<uint32_t> volumes(n);
        for (size_t i = 0; i < n; ++i) {
            speeds[i] = static_cast<float>(rng() % 4000) / 13.0f;
            volumes[i] = static_cast<uint32_t>(rng() % 500);
        }
        const auto qs = normalize_speed(speeds, norm);
        const auto qv = normalize_volume(volumes, norm);
        if (qs.size() != n || qv.size() != n) {
            report(7, "FAIL", "normalization changed plane dims");
            return;
        }
        for (size_t i = 1; i < n; ++i) {
            // order by input, compare outputs pairwise against element 0
            if ((speeds[i] <= speeds[0] && qs[i] > qs[0]) ||
                (speeds[i] >= speeds[0] && qs[i] < qs[0])) {
                report(7, "FAIL", "speed normalization is not monotonic");
                return;
            }
            if ((volumes[i] <= volumes[0] && qv[i] > qv[0]) ||
                (volumes[i] >= volumes[0] && qv[i] < qv[0])) {
                report(7, "FAIL", "volume normalization is not monotonic");
                return;
            }
        }
        if (norm.volume_mode == VolumeMode::PerFrameMinMax) {
            const auto [lo, hi] = std::minmax_element(volumes.begin(), volumes.end());
            if (*lo != *hi) {
                const size_t lo_i = lo - volumes.begin(), hi_i = hi - volumes.begin();
                if (qv[lo_i] != 0 || qv[hi_i] != 255) {
                    report(7, "FAIL", "min-max mode does not span 0..255");
                    return;
                }
            }
        }
        const double speed_ceiling_q = quantize_speed(norm.speed_max + 1.0, norm);
        if (speed_ceiling_q != 255) {
            report(7, "FAIL", "values above the speed scale must map to 255");
            return;
        }
    }

    // exhaustive 4 x 4 x 8 x 8 index round trip
    GridSpec tiny;
    tiny.min_step = 360; // T = 4
    tiny.lat_min = 0.0;
    tiny.lat_max = 8.0;
    tiny.lon_min = 0.0;
    tiny.lon_max = 8.0;
    tiny.lat_step = 1.0;
    tiny.lon_step = 1.0; // R = C = 8, D = 4
    if (tiny.batches() != 4 || tiny.directions() != 4 || tiny.rows() != 8 || tiny.cols() != 8) {
        report(7, "FAIL", "tiny grid is not 4x4x8x8");
        return;
    }
    for (uint64_t g = 0; g < tiny.cell_count(); ++g) {
        if (global_index(decompose(g, tiny), tiny) != g) {
            report(7, "FAIL", "index round trip failed at g=" + std::to_string(g));
            return;
        }
    }

    report(7, "PASS",
           "container bitwise round trip (288 frames); normalization monotone + in range "
           "(1000 planes); index round trip exhaustive on 4x4x8x8");
}

} // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    using CriterionFn = void (*)();
    const CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                    criterion_5, criterion_6, criterion_7};
    if (which < 0 || which > 7) {
        std::fprintf(stderr, "usage: acceptance [1..7]\n");
        return 2;
    }
    if (which == 0) {
        for (auto fn : criteria) fn();
    } else {
        criteria[which - 1]();
    }
    return g_failures == 0 ? 0 : 1;
}

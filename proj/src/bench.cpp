#include "cvl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <unistd.h>
#include <numeric>
#include <thread>
#include <unordered_map>

#include "cvl/error.hpp"
#include "cvl/grid.hpp"
#include "cvl/ingest.hpp"

namespace cvl {

namespace {

// Keeps timed kernels from being optimized away.
std::atomic<uint64_t> g_sink{0};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

} // namespace

RunStats RunStats::from_samples(std::vector<double> samples) {
    if (samples.empty()) fail(Err::BadConfig, "RunStats needs at least one sample");
    RunStats out;
    out.n_runs = static_cast<uint32_t>(samples.size());
    out.min = *std::min_element(samples.begin(), samples.end());
    out.max = *std::max_element(samples.begin(), samples.end());
    out.avg = std::accumulate(samples.begin(), samples.end(), 0.0) /
              static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - out.avg) * (s - out.avg);
    out.std_dev = std::sqrt(var / static_cast<double>(samples.size())); // population
    out.samples = std::move(samples);
    return out;
}

RunStats time_repeated(const std::function<void()>& task, uint32_t n_runs,
                       uint32_t discard_warmup) {
    if (n_runs == 0) fail(Err::BadConfig, "n_runs must be >= 1");
    std::vector<double> samples;
    samples.reserve(n_runs);
    for (uint32_t run = 0; run < discard_warmup + n_runs; ++run) {
        const double t0 = now_seconds();
        try {
            task();
        } catch (const std::exception& e) {
            fail(Err::TaskFailed, "run " + std::to_string(run) + ": " + e.what());
        }
        const double elapsed = now_seconds() - t0;
        if (run >= discard_warmup) samples.push_back(elapsed);
    }
    return RunStats::from_samples(std::move(samples));
}

double speedup(const RunStats& baseline, const RunStats& optimized) {
    if (!(optimized.avg > 0.0)) fail(Err::DivideByZero, "optimized average is zero");
    return baseline.avg / optimized.avg;
}

// ---------------------------------------------------------------------------
// Oracle pipeline. Deliberately naive and self-contained: its own dedup,
// filtering, floor/snap binning, and dense accumulation over the full
// T x D x R x C lattice. It shares geometry constants with GridSpec but no
// aggregation code with run_pipeline.
// ---------------------------------------------------------------------------

std::vector<BatchFrame> oracle_pipeline(
    const std::vector<std::pair<CvRecord, RecordProvenance>>& raw_records, const GridSpec& spec,
    const FilterRules& rules) {
    spec.validate();

    const uint64_t T = spec.batches(), D = spec.directions(), R = spec.rows(), C = spec.cols();
    const uint64_t total = T * D * R * C;

    // dedup: stable total order, first of each (journey, timestamp) group wins
    std::vector<size_t> order(raw_records.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const auto& ra = raw_records[a];
        const auto& rb = raw_records[b];
        if (ra.first.journey_id != rb.first.journey_id)
            return ra.first.journey_id < rb.first.journey_id;
        if (ra.first.timestamp != rb.first.timestamp)
            return ra.first.timestamp < rb.first.timestamp;
        return ra.second < rb.second;
    });

    std::vector<double> speed_sum(total, 0.0);
    std::vector<uint64_t> count(total, 0);
    std::vector<std::pair<uint64_t, uint32_t>> cell_journeys; // (g, journey ordinal)
    std::unordered_map<std::string, uint32_t> journey_ordinal;

    auto bin1d = [](double x, double lo, double step, uint64_t n) -> uint64_t {
        const double q = snap_to_integer((x - lo) / step);
        double b = std::floor(q);
        if (b < 0.0) b = 0.0;
        if (b > static_cast<double>(n - 1)) b = static_cast<double>(n - 1);
        return static_cast<uint64_t>(b);
    };

    const std::string* prev_journey = nullptr;
    const Timestamp* prev_ts = nullptr;
    for (size_t idx : order) {
        const CvRecord& rec = raw_records[idx].first;
        // skip later members of a duplicate-key group
        if (prev_journey && *prev_journey == rec.journey_id && *prev_ts == rec.timestamp)
            continue;
        prev_journey = &rec.journey_id;
        prev_ts = &rec.timestamp;

        if (rules.drop_missing && rec.journey_id.empty()) continue;
        if (rules.require_in_grid &&
            !(rec.latitude >= spec.lat_min && rec.latitude <= spec.lat_max &&
              rec.longitude >= spec.lon_min && rec.longitude <= spec.lon_max))
            continue;
        if (rec.speed > rules.speed_ceiling) continue;

        const uint64_t t = static_cast<uint64_t>(rec.timestamp.minute_of_day()) / spec.min_step;
        double h = std::fmod(rec.heading + spec.dxn_offset, 360.0);
        if (h < 0.0) h += 360.0;
        const uint64_t d =
            static_cast<uint64_t>(std::floor(snap_to_integer(h / spec.dxn_step))) % D;
        const uint64_t r = bin1d(rec.latitude, spec.lat_min, spec.lat_step, R);
        const uint64_t c = bin1d(rec.longitude, spec.lon_min, spec.lon_step, C);
        const uint64_t g = ((t * D + d) * R + r) * C + c;

        speed_sum[g] += rec.speed;
        ++count[g];
        const auto [it, _] = journey_ordinal.try_emplace(
            rec.journey_id, static_cast<uint32_t>(journey_ordinal.size()));
        cell_journeys.emplace_back(g, it->second);
    }

    std::sort(cell_journeys.begin(), cell_journeys.end());
    cell_journeys.erase(std::unique(cell_journeys.begin(), cell_journeys.end()),
                        cell_journeys.end());

    std::vector<BatchFrame> frames;
    frames.reserve(T);
    for (uint32_t t = 0; t < T; ++t) frames.push_back(BatchFrame::zeros(t, spec));

    const uint64_t plane = R * C;
    for (uint64_t g = 0; g < total; ++g) {
        if (count[g] == 0) continue;
        BatchFrame& f = frames[g / (D * plane)];
        const uint64_t d = (g / plane) % D;
        const uint64_t rc = g % plane;
        f.speed[d][rc] = static_cast<float>(speed_sum[g] / static_cast<double>(count[g]));
        f.raw_count[d][rc] = static_cast<uint32_t>(count[g]);
    }
    for (size_t i = 0; i < cell_journeys.size();) {
        size_t j = i;
        const uint64_t g = cell_journeys[i].first;
        while (j < cell_journeys.size() && cell_journeys[j].first == g) ++j;
        BatchFrame& f = frames[g / (D * plane)];
        f.volume[(g / plane) % D][g % plane] = static_cast<uint32_t>(j - i);
        i = j;
    }
    return frames;
}

// ---------------------------------------------------------------------------
// Stage benchmarks mirroring the twelve instrumented operations plus Overall.
// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void parallel_chunks(size_t n, uint32_t n_threads, Fn&& fn) { // fn(lo, hi)
    const uint32_t workers =
        std::max<uint32_t>(1, std::min<uint64_t>(n_threads, n == 0 ? 1 : n));
    if (workers == 1) {
        fn(size_t{0}, n);
        return;
    }
    const size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (uint32_t w = 0; w < workers; ++w) {
        const size_t lo = std::min(n, w * chunk);
        const size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

struct StageData {
    std::vector<CvRecord> records; // deduped, unfiltered
    std::vector<BatchFrame> frames;
    GridSpec spec;
};

void export_planes_naive(const StageData& d, bool volume_planes, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& frame : d.frames) {
        for (uint32_t dir = 0; dir < 4; ++dir) {
            if (volume_planes) {
                for (uint32_t v : frame.volume[dir])
                    out.write(reinterpret_cast<const char*>(&v), 4); // one value at a time
            } else {
                for (float v : frame.speed[dir])
                    out.write(reinterpret_cast<const char*>(&v), 4);
            }
        }
    }
}

void export_planes_buffered(const StageData& d, bool volume_planes, const std::string& path) {
    std::vector<char> buf;
    const size_t cells = d.frames.empty() ? 0 : d.frames[0].speed[0].size();
    buf.reserve(d.frames.size() * 4 * cells * 4);
    for (const auto& frame : d.frames) {
        for (uint32_t dir = 0; dir < 4; ++dir) {
            const char* src = volume_planes
                                  ? reinterpret_cast<const char*>(frame.volume[dir].data())
                                  : reinterpret_cast<const char*>(frame.speed[dir].data());
            buf.insert(buf.end(), src, src + frame.volume[dir].size() * 4);
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

} // namespace

SpeedupReport run_stage_benchmarks(const SourceManifest& manifest, const GridSpec& spec,
                                   const FilterRules& rules, const NormalizationSpec& norm,
                                   const BenchConfig& config) {
    const uint32_t n_threads = config.n_threads ? config.n_threads : default_thread_count();
    const uint32_t n_partitions = config.n_partitions ? config.n_partitions : 2 * n_threads;

    // untimed prep: parse + dedup once, finalize once
    std::vector<std::pair<CvRecord, RecordProvenance>> raw;
    for (const auto& path : manifest.shard_paths) {
        ShardData shard = read_shard(path);
        for (size_t k = 0; k < shard.records.size(); ++k)
            raw.emplace_back(std::move(shard.records[k]),
                             RecordProvenance{path, shard.line_numbers[k]});
    }
    StageData data;
    data.spec = spec;
    data.records = deduplicate(raw, nullptr);
    data.frames = run_pipeline_from_records(raw, spec, rules, n_partitions, n_threads);

    const std::vector<CvRecord>& recs = data.records;
    const size_t n = recs.size();

    std::vector<uint32_t> bin_out(n);
    std::vector<uint64_t> g_out(n);

    const std::string tmp_export =
        (std::filesystem::temp_directory_path() /
         ("cvl_bench_export_" + std::to_string(::getpid()) + ".bin"))
            .string();

    auto time_pair = [&](const std::string& operation, const std::string& metric,
                         const std::function<void()>& serial,
                         const std::function<void()>& parallel) -> SpeedupRow {
        SpeedupRow row;
        row.operation = operation;
        row.metric = metric;
        row.baseline = time_repeated(serial, config.n_runs, config.discard_warmup);
        row.optimized = time_repeated(parallel, config.n_runs, config.discard_warmup);
        row.speedup = speedup(row.baseline, row.optimized);
        return row;
    };

    auto lat_serial = [&] {
        for (size_t i = 0; i < n; ++i) bin_out[i] = lat_bin(recs[i].latitude, spec);
        g_sink += n ? bin_out[n / 2] : 0;
    };
    auto lat_parallel = [&] {
        parallel_chunks(n, n_threads, [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i) bin_out[i] = lat_bin(recs[i].latitude, spec);
        });
        g_sink += n ? bin_out[n / 2] : 0;
    };
    auto lon_serial = [&] {
        for (size_t i = 0; i < n; ++i) bin_out[i] = lon_bin(recs[i].longitude, spec);
        g_sink += n ? bin_out[n / 2] : 0;
    };
    auto lon_parallel = [&] {
        parallel_chunks(n, n_threads, [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i) bin_out[i] = lon_bin(recs[i].longitude, spec);
        });
        g_sink += n ? bin_out[n / 2] : 0;
    };

    auto full_bin = [&](size_t i) {
        const CvRecord& r = recs[i];
        const CellIndex cell{time_bin(r.timestamp, spec), dxn_bin(r.heading, spec),
                             lat_bin(r.latitude, spec), lon_bin(r.longitude, spec)};
        return global_index(cell, spec);
    };
    auto binning_serial = [&] {
        for (size_t i = 0; i < n; ++i) g_out[i] = full_bin(i);
        g_sink += n ? g_out[n / 2] : 0;
    };
    auto binning_parallel = [&] {
        parallel_chunks(n, n_threads, [&](size_t lo, size_t hi) {
            for (size_t i = lo; i < hi; ++i) g_out[i] = full_bin(i);
        });
        g_sink += n ? g_out[n / 2] : 0;
    };

    auto filter_serial = [&] {
        uint64_t kept = 0;
        for (const auto& r : recs) {
            if (rules.drop_missing && r.journey_id.empty()) continue;
            if (rules.require_in_grid &&
                !(r.latitude >= spec.lat_min && r.latitude <= spec.lat_max &&
                  r.longitude >= spec.lon_min && r.longitude <= spec.lon_max))
                continue;
            if (r.speed > rules.speed_ceiling) continue;
            ++kept;
        }
        g_sink += kept;
    };
    auto filter_parallel = [&] {
        std::atomic<uint64_t> kept{0};
        parallel_chunks(n, n_threads, [&](size_t lo, size_t hi) {
            uint64_t local = 0;
            for (size_t i = lo; i < hi; ++i) {
                const auto& r = recs[i];
                if (rules.drop_missing && r.journey_id.empty()) continue;
                if (rules.require_in_grid &&
                    !(r.latitude >= spec.lat_min && r.latitude <= spec.lat_max &&
                      r.longitude >= spec.lon_min && r.longitude <= spec.lon_max))
                    continue;
                if (r.speed > rules.speed_ceiling) continue;
                ++local;
            }
            kept += local;
        });
        g_sink += kept.load();
    };

    // Reduction - Sum: per-cell record count and speed sum
    auto reduce_sum_serial = [&] {
        std::unordered_map<uint64_t, std::pair<double, uint64_t>> agg;
        agg.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            auto& slot = agg[g_out[i]];
            slot.first += recs[i].speed;
            ++slot.second;
        }
        g_sink += agg.size();
    };
    auto reduce_sum_parallel = [&] {
        const uint32_t workers = std::max<uint32_t>(1, n_threads);
        std::vector<std::unordered_map<uint64_t, std::pair<double, uint64_t>>> locals(workers);
        const size_t chunk = (n + workers - 1) / std::max<size_t>(workers, 1);
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                auto& local = locals[w];
                const size_t lo = std::min(n, w * chunk), hi = std::min(n, lo + chunk);
                local.reserve(hi - lo);
                for (size_t i = lo; i < hi; ++i) {
                    auto& slot = local[g_out[i]];
                    slot.first += recs[i].speed;
                    ++slot.second;
                }
            });
        }
        for (auto& t : pool) t.join();
        auto& merged = locals[0];
        for (uint32_t w = 1; w < workers; ++w)
            for (const auto& [g, s] : locals[w]) {
                auto& slot = merged[g];
                slot.first += s.first;
                slot.second += s.second;
            }
        g_sink += merged.size();
    };

    // Reduction - Count: distinct journeys per cell
    std::vector<uint32_t> journey_idx(n);
    {
        std::unordered_map<std::string_view, uint32_t> ids;
        for (size_t i = 0; i < n; ++i) {
            auto [it, _] =
                ids.try_emplace(recs[i].journey_id, static_cast<uint32_t>(ids.size()));
            journey_idx[i] = it->second;
        }
    }
    auto reduce_count_serial = [&] {
        std::vector<std::pair<uint64_t, uint32_t>> pairs(n);
        for (size_t i = 0; i < n; ++i) pairs[i] = {g_out[i], journey_idx[i]};
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        g_sink += pairs.size();
    };
    auto reduce_count_parallel = [&] {
        const uint32_t workers = std::max<uint32_t>(1, n_threads);
        // route disjoint key ranges to workers, dedup locally, sum counts
        std::vector<std::vector<std::pair<uint64_t, uint32_t>>> buckets(workers);
        for (auto& b : buckets) b.reserve(n / workers + 1);
        for (size_t i = 0; i < n; ++i)
            buckets[(g_out[i] * 0x9e3779b97f4a7c15ull >> 32) % workers].emplace_back(
                g_out[i], journey_idx[i]);
        std::atomic<uint64_t> distinct{0};
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                auto& b = buckets[w];
                std::sort(b.begin(), b.end());
                b.erase(std::unique(b.begin(), b.end()), b.end());
                distinct += b.size();
            });
        }
        for (auto& t : pool) t.join();
        g_sink += distinct.load();
    };

    auto normalize_speed_task = [&](bool parallel) {
        auto work = [&](size_t lo, size_t hi) {
            for (size_t f = lo; f < hi; ++f)
                for (uint32_t dir = 0; dir < 4; ++dir) {
                    auto q = normalize_speed(data.frames[f].speed[dir], norm);
                    g_sink += q.empty() ? 0 : q[0];
                }
        };
        if (parallel)
            parallel_chunks(data.frames.size(), n_threads, work);
        else
            work(0, data.frames.size());
    };
    auto normalize_volume_task = [&](bool parallel) {
        auto work = [&](size_t lo, size_t hi) {
            for (size_t f = lo; f < hi; ++f)
                for (uint32_t dir = 0; dir < 4; ++dir) {
                    auto q = normalize_volume(data.frames[f].volume[dir], norm);
                    g_sink += q.empty() ? 0 : q[0];
                }
        };
        if (parallel)
            parallel_chunks(data.frames.size(), n_threads, work);
        else
            work(0, data.frames.size());
    };

    SpeedupReport report;
    report.rows.push_back(
        time_pair("Data Binning", "Speed", binning_serial, binning_parallel));
    report.rows.push_back(time_pair("Indexing - Latitude", "Speed", lat_serial, lat_parallel));
    report.rows.push_back(time_pair("Indexing - Longitude", "Speed", lon_serial, lon_parallel));
    report.rows.push_back(time_pair("Normalization", "Speed",
                                    [&] { normalize_speed_task(false); },
                                    [&] { normalize_speed_task(true); }));
    report.rows.push_back(time_pair("Data Export", "Speed",
                                    [&] { export_planes_naive(data, false, tmp_export); },
                                    [&] { export_planes_buffered(data, false, tmp_export); }));
    report.rows.push_back(
        time_pair("Reduction - Count", "Volume", reduce_count_serial, reduce_count_parallel));
    report.rows.push_back(
        time_pair("Reduction - Sum", "Volume", reduce_sum_serial, reduce_sum_parallel));
    report.rows.push_back(time_pair("Indexing - Latitude", "Volume", lat_serial, lat_parallel));
    report.rows.push_back(time_pair("Indexing - Longitude", "Volume", lon_serial, lon_parallel));
    report.rows.push_back(time_pair("Filter", "Volume", filter_serial, filter_parallel));
    report.rows.push_back(time_pair("Normalization", "Volume",
                                    [&] { normalize_volume_task(false); },
                                    [&] { normalize_volume_task(true); }));
    report.rows.push_back(time_pair("Data Export", "Volume",
                                    [&] { export_planes_naive(data, true, tmp_export); },
                                    [&] { export_planes_buffered(data, true, tmp_export); }));

    // Overall: manifest -> frames on both sides.
    auto overall_serial = [&] {
        std::vector<BatchFrame> frames;
        if (config.reread_inputs) {
            std::vector<std::pair<CvRecord, RecordProvenance>> rows;
            for (const auto& path : manifest.shard_paths) {
                ShardData shard = read_shard(path);
                for (size_t k = 0; k < shard.records.size(); ++k)
                    rows.emplace_back(std::move(shard.records[k]),
                                      RecordProvenance{path, shard.line_numbers[k]});
            }
            frames = oracle_pipeline(rows, spec, rules);
        } else {
            frames = oracle_pipeline(raw, spec, rules);
        }
        g_sink += frames.size();
    };
    auto overall_parallel = [&] {
        auto frames = config.reread_inputs
                          ? run_pipeline(manifest, spec, rules, n_partitions, n_threads)
                          : run_pipeline_from_records(raw, spec, rules, n_partitions, n_threads);
        g_sink += frames.size();
    };
    report.rows.push_back(time_pair("Overall", "", overall_serial, overall_parallel));

    std::error_code ec;
    std::filesystem::remove(tmp_export, ec);
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

} // namespace

std::string emit_report(const SpeedupReport& report, ReportFormat format) {
    static constexpr const char* kCols[] = {
        "Operation",    "Metric",       "Serial Avg",   "Serial Min",
        "Serial Max",   "Serial StdDev", "Parallel Avg", "Parallel Min",
        "Parallel Max", "Parallel StdDev", "Speedup"};

    std::string out;
    if (format == ReportFormat::Markdown) {
        out += "|";
        for (const char* c : kCols) out += std::string(" ") + c + " |";
        out += "\n|";
        for (size_t i = 0; i < std::size(kCols); ++i) out += " --- |";
        out += "\n";
        for (const auto& row : report.rows) {
            out += "| " + row.operation + " | " + row.metric + " | ";
            out += fmt6(row.baseline.avg) + " | " + fmt6(row.baseline.min) + " | " +
                   fmt6(row.baseline.max) + " | " + fmt6(row.baseline.std_dev) + " | ";
            out += fmt6(row.optimized.avg) + " | " + fmt6(row.optimized.min) + " | " +
                   fmt6(row.optimized.max) + " | " + fmt6(row.optimized.std_dev) + " | ";
            out += fmt6(row.speedup) + " |\n";
        }
        return out;
    }

    for (size_t i = 0; i < std::size(kCols); ++i) {
        if (i) out += ",";
        out += kCols[i];
    }
    out += "\n";
    for (const auto& row : report.rows) {
        out += csv_quote(row.operation) + "," + csv_quote(row.metric) + ",";
        out += fmt6(row.baseline.avg) + "," + fmt6(row.baseline.min) + "," +
               fmt6(row.baseline.max) + "," + fmt6(row.baseline.std_dev) + ",";
        out += fmt6(row.optimized.avg) + "," + fmt6(row.optimized.min) + "," +
               fmt6(row.optimized.max) + "," + fmt6(row.optimized.std_dev) + ",";
        out += fmt6(row.speedup) + "\n";
    }
    return out;
}

} // namespace cvl

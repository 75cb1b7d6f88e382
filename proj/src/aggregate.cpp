#include "cvl/aggregate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "cvl/error.hpp"
#include "cvl/ingest.hpp"

namespace cvl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Run fn(i) for i in [0, n) across up to n_threads workers.
template <typename Fn>
void parallel_for(uint64_t n, uint32_t n_threads, Fn&& fn) {
    if (n == 0) return;
    const uint32_t workers = std::max<uint32_t>(1, std::min<uint64_t>(n_threads, n));
    if (workers == 1) {
        for (uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (uint64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace

uint32_t default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

DropReason filter_reason(const CvRecord& rec, const GridSpec& spec, const FilterRules& rules) {
    if (rules.drop_missing && rec.journey_id.empty()) return DropReason::MissingField;
    if (rules.require_in_grid &&
        !(rec.latitude >= spec.lat_min && rec.latitude <= spec.lat_max &&
          rec.longitude >= spec.lon_min && rec.longitude <= spec.lon_max))
        return DropReason::OutOfGrid;
    if (rec.speed > rules.speed_ceiling) return DropReason::SpeedCeiling;
    return DropReason::Keep;
}

std::vector<CvRecord> filter_records(std::vector<CvRecord> records, const GridSpec& spec,
                                     const FilterRules& rules, FilterCounts& counts) {
    std::vector<CvRecord> kept;
    kept.reserve(records.size());
    for (auto& rec : records) {
        switch (filter_reason(rec, spec, rules)) {
        case DropReason::Keep: kept.push_back(std::move(rec)); break;
        case DropReason::OutOfGrid: ++counts.out_of_grid; break;
        case DropReason::SpeedCeiling: ++counts.speed_ceiling; break;
        case DropReason::MissingField: ++counts.missing_field; break;
        }
    }
    return kept;
}

size_t PartialAggregate::KeyHash::operator()(const Key& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < 8; ++i) h = (h ^ ((k.g >> (8 * i)) & 0xff)) * 1099511628211ull;
    for (char c : k.journey) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    return static_cast<size_t>(h);
}

void PartialAggregate::accumulate(const CvRecord& record) {
    const CellIndex cell{time_bin(record.timestamp, grid_), dxn_bin(record.heading, grid_),
                         lat_bin(record.latitude, grid_), lon_bin(record.longitude, grid_)};
    auto& stats = cells_[Key{global_index(cell, grid_), record.journey_id}];
    stats.speed_sum += record.speed;
    ++stats.count;
    ++records_seen_;
}

void PartialAggregate::merge_entry(uint64_t g, std::string_view journey, double speed_sum,
                                   uint64_t count) {
    if (g >= grid_.cell_count()) fail(Err::IndexOverflow, "entry index " + std::to_string(g));
    auto& stats = cells_[Key{g, std::string(journey)}];
    stats.speed_sum += speed_sum;
    stats.count += count;
    records_seen_ += count;
}

void PartialAggregate::merge_from(const PartialAggregate& other) {
    if (!(grid_ == other.grid_)) fail(Err::GridMismatch, "partials use different grids");
    cells_.reserve(cells_.size() + other.cells_.size());
    for (const auto& [key, stats] : other.cells_) {
        auto& mine = cells_[key];
        mine.speed_sum += stats.speed_sum;
        mine.count += stats.count;
    }
    records_seen_ += other.records_seen_;
}

PartialAggregate merge(const PartialAggregate& a, const PartialAggregate& b) {
    PartialAggregate out = a;
    out.merge_from(b);
    return out;
}

CellStats PartialAggregate::cell_stats(uint64_t g) const {
    std::vector<const std::pair<const Key, JourneyStats>*> entries;
    for (const auto& entry : cells_)
        if (entry.first.g == g) entries.push_back(&entry);
    // canonical fold: per-journey sums added in journey-id order
    std::sort(entries.begin(), entries.end(),
              [](auto* a, auto* b) { return a->first.journey < b->first.journey; });
    CellStats out;
    for (auto* e : entries) {
        out.speed_sum += e->second.speed_sum;
        out.record_count += e->second.count;
        out.journey_ids.insert(e->first.journey);
    }
    return out;
}

BatchFrame BatchFrame::zeros(uint32_t t, const GridSpec& spec) {
    BatchFrame frame;
    frame.t = t;
    frame.rows = spec.rows();
    frame.cols = spec.cols();
    const size_t n = static_cast<size_t>(frame.rows) * frame.cols;
    for (uint32_t d = 0; d < 4; ++d) {
        frame.speed[d].assign(n, 0.0f);
        frame.volume[d].assign(n, 0u);
        frame.raw_count[d].assign(n, 0u);
    }
    return frame;
}

bool BatchFrame::bitwise_equal(const BatchFrame& other) const {
    if (t != other.t || rows != other.rows || cols != other.cols) return false;
    for (uint32_t d = 0; d < 4; ++d) {
        if (volume[d] != other.volume[d]) return false;
        if (speed[d].size() != other.speed[d].size()) return false;
        for (size_t i = 0; i < speed[d].size(); ++i) {
            uint32_t a, b;
            static_assert(sizeof(float) == sizeof(uint32_t));
            std::memcpy(&a, &speed[d][i], 4);
            std::memcpy(&b, &other.speed[d][i], 4);
            if (a != b) return false;
        }
    }
    return true;
}

void PartialAggregate::finalize_range(
    std::vector<const std::pair<const Key, JourneyStats>*>& sorted, size_t begin, size_t end,
    std::vector<BatchFrame>& frames) const {
    const uint64_t D = grid_.directions(), R = grid_.rows(), C = grid_.cols();
    const uint64_t plane = R * C;
    size_t i = begin;
    while (i < end) {
        size_t j = i;
        const uint64_t g = sorted[i]->first.g;
        double speed_sum = 0.0;
        uint64_t count = 0;
        while (j < end && sorted[j]->first.g == g) {
            speed_sum += sorted[j]->second.speed_sum;
            count += sorted[j]->second.count;
            ++j;
        }
        const uint64_t t = g / (D * plane);
        const uint64_t d = (g / plane) % D;
        const uint64_t rc = g % plane;
        BatchFrame& frame = frames[t];
        // single f64 division, narrowed to f32 once
        frame.speed[d][rc] = static_cast<float>(speed_sum / static_cast<double>(count));
        frame.volume[d][rc] = static_cast<uint32_t>(j - i); // keys are unique per journey
        frame.raw_count[d][rc] = static_cast<uint32_t>(count);
        i = j;
    }
}

std::vector<BatchFrame> PartialAggregate::finalize_day() const {
    const uint32_t T = grid_.batches();
    std::vector<BatchFrame> frames;
    frames.reserve(T);
    for (uint32_t t = 0; t < T; ++t) frames.push_back(BatchFrame::zeros(t, grid_));

    std::vector<const std::pair<const Key, JourneyStats>*> sorted;
    sorted.reserve(cells_.size());
    for (const auto& entry : cells_) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
        if (a->first.g != b->first.g) return a->first.g < b->first.g;
        return a->first.journey < b->first.journey;
    });
    finalize_range(sorted, 0, sorted.size(), frames);
    return frames;
}

BatchFrame PartialAggregate::finalize_batch(uint32_t t) const {
    const uint64_t D = grid_.directions();
    const uint64_t plane = static_cast<uint64_t>(grid_.rows()) * grid_.cols();
    const uint64_t lo = static_cast<uint64_t>(t) * D * plane;
    const uint64_t hi = lo + D * plane;

    std::vector<BatchFrame> frames;
    for (uint32_t i = 0; i < grid_.batches(); ++i) {
        if (i == t) {
            frames.push_back(BatchFrame::zeros(i, grid_));
        } else {
            frames.push_back(BatchFrame{});
            frames.back().t = i;
        }
    }

    std::vector<const std::pair<const Key, JourneyStats>*> sorted;
    for (const auto& entry : cells_)
        if (entry.first.g >= lo && entry.first.g < hi) sorted.push_back(&entry);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
        if (a->first.g != b->first.g) return a->first.g < b->first.g;
        return a->first.journey < b->first.journey;
    });
    finalize_range(sorted, 0, sorted.size(), frames);
    return std::move(frames[t]);
}

namespace {

struct RoutedRecord {
    CvRecord record;
    uint32_t shard_rank; // lexicographic rank of the shard path
    uint32_t line;
};

// per parse-worker, per partition
using RoutedBuckets = std::vector<std::vector<std::vector<RoutedRecord>>>;

// Phases 2-4: per-partition dedup/filter/sort/accumulate, merge, finalize.
std::vector<BatchFrame> aggregate_routed(RoutedBuckets& routed, const GridSpec& spec,
                                         const FilterRules& rules, uint32_t n_partitions,
                                         uint32_t n_threads, PipelineStats& st) {
    const uint32_t parse_workers = static_cast<uint32_t>(routed.size());
    auto t0 = std::chrono::steady_clock::now();
    std::vector<PartialAggregate> partials(n_partitions, PartialAggregate(spec));
    std::vector<FilterCounts> part_filter(n_partitions);
    std::vector<uint64_t> part_dups(n_partitions, 0), part_conflicts(n_partitions, 0),
        part_parsed(n_partitions, 0);

    parallel_for(n_partitions, n_threads, [&](uint64_t p) {
        std::vector<RoutedRecord*> rows;
        {
            size_t total = 0;
            for (uint32_t w = 0; w < parse_workers; ++w) total += routed[w][p].size();
            rows.reserve(total);
        }
        for (uint32_t w = 0; w < parse_workers; ++w)
            for (auto& rr : routed[w][p]) rows.push_back(&rr);
        part_parsed[p] = rows.size();

        // dedup on (journey, timestamp), min-provenance survivor
        struct DKey {
            std::string_view journey;
            int64_t sec;
            bool operator==(const DKey&) const = default;
        };
        struct DKeyHash {
            size_t operator()(const DKey& k) const {
                uint64_t h = journey_hash(k.journey);
                h ^= static_cast<uint64_t>(k.sec) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
                return static_cast<size_t>(h);
            }
        };
        std::unordered_map<DKey, size_t, DKeyHash> best;
        best.reserve(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            const DKey key{rows[i]->record.journey_id, rows[i]->record.timestamp.epoch_sec};
            auto [it, inserted] = best.try_emplace(key, i);
            if (inserted) continue;
            RoutedRecord& incumbent = *rows[it->second];
            if (rows[i]->record != incumbent.record) ++part_conflicts[p];
            if (std::pair(rows[i]->shard_rank, rows[i]->line) <
                std::pair(incumbent.shard_rank, incumbent.line))
                it->second = i;
        }
        part_dups[p] = rows.size() - best.size();

        std::vector<const CvRecord*> kept;
        kept.reserve(best.size());
        for (const auto& [_, idx] : best) {
            const CvRecord& rec = rows[idx]->record;
            switch (filter_reason(rec, spec, rules)) {
            case DropReason::Keep: kept.push_back(&rec); break;
            case DropReason::OutOfGrid: ++part_filter[p].out_of_grid; break;
            case DropReason::SpeedCeiling: ++part_filter[p].speed_ceiling; break;
            case DropReason::MissingField: ++part_filter[p].missing_field; break;
            }
        }

        // journey ids -> lexicographic ranks, so record order below is
        // canonical (arrival order can never leak into the f64 folds)
        std::vector<std::string_view> ids;
        ids.reserve(kept.size());
        for (const CvRecord* rec : kept) ids.push_back(rec->journey_id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::unordered_map<std::string_view, uint32_t> rank_of;
        rank_of.reserve(ids.size());
        for (uint32_t r = 0; r < ids.size(); ++r) rank_of[ids[r]] = r;

        struct Item {
            uint32_t rank;
            int64_t sec;
            const CvRecord* rec;
        };
        std::vector<Item> items;
        items.reserve(kept.size());
        for (const CvRecord* rec : kept)
            items.push_back({rank_of[rec->journey_id], rec->timestamp.epoch_sec, rec});
        std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.sec < b.sec;
        });

        // integer-keyed accumulation; string keys materialize once per entry
        struct GRKey {
            uint64_t g;
            uint32_t rank;
            bool operator==(const GRKey&) const = default;
        };
        struct GRHash {
            size_t operator()(const GRKey& k) const {
                uint64_t h = (k.g + 0x9e3779b97f4a7c15ull) * 0xbf58476d1ce4e5b9ull;
                h ^= (static_cast<uint64_t>(k.rank) + 0x94d049bb133111ebull) * 0xff51afd7ed558ccdull;
                return static_cast<size_t>(h ^ (h >> 29));
            }
        };
        struct Subtotal {
            double speed_sum = 0.0;
            uint64_t count = 0;
        };
        std::unordered_map<GRKey, Subtotal, GRHash> cellmap;
        cellmap.reserve(items.size());
        for (const Item& item : items) {
            const CvRecord& rec = *item.rec;
            const CellIndex cell{time_bin(rec.timestamp, spec), dxn_bin(rec.heading, spec),
                                 lat_bin(rec.latitude, spec), lon_bin(rec.longitude, spec)};
            auto& stats = cellmap[GRKey{global_index(cell, spec), item.rank}];
            stats.speed_sum += rec.speed;
            ++stats.count;
        }
        for (const auto& [key, stats] : cellmap)
            partials[p].merge_entry(key.g, ids[key.rank], stats.speed_sum, stats.count);
    });
    routed.clear();
    for (uint32_t p = 0; p < n_partitions; ++p) {
        st.parsed += part_parsed[p];
        st.duplicates_dropped += part_dups[p];
        st.conflicting_duplicates += part_conflicts[p];
        st.filtered["OutOfGrid"] += part_filter[p].out_of_grid;
        st.filtered["SpeedCeiling"] += part_filter[p].speed_ceiling;
        st.filtered["MissingField"] += part_filter[p].missing_field;
        st.accepted += partials[p].records_seen();
    }
    st.stage_seconds.emplace_back("dedup+filter+accumulate", seconds_since(t0));

    // Phase 3: merge. Journeys never straddle partitions, so merged keys are
    // disjoint and the result is independent of merge order.
    t0 = std::chrono::steady_clock::now();
    PartialAggregate merged(spec);
    for (auto& p : partials) merged.merge_from(p);
    partials.clear();
    st.stage_seconds.emplace_back("merge", seconds_since(t0));

    // Phase 4: finalize all batches.
    t0 = std::chrono::steady_clock::now();
    std::vector<BatchFrame> frames = merged.finalize_day();
    st.stage_seconds.emplace_back("finalize", seconds_since(t0));
    return frames;
}

// Lexicographic ranks make the dedup survivor rule immune to shard-order
// shuffling: provenance compares by path order, not arrival order.
std::vector<uint32_t> lexicographic_ranks(const std::vector<std::string>& paths) {
    std::vector<size_t> order(paths.size());
    for (size_t i = 0; i < paths.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return paths[a] < paths[b]; });
    std::vector<uint32_t> rank(paths.size());
    for (size_t r = 0; r < paths.size(); ++r) rank[order[r]] = static_cast<uint32_t>(r);
    return rank;
}

} // namespace

std::vector<BatchFrame> run_pipeline(const SourceManifest& manifest, const GridSpec& spec,
                                     const FilterRules& rules, uint32_t n_partitions,
                                     uint32_t n_threads, PipelineStats* stats) {
    spec.validate();
    if (n_partitions == 0) fail(Err::ZeroPartitions, "n_partitions must be >= 1");
    if (n_threads == 0) n_threads = default_thread_count();

    PipelineStats local;
    PipelineStats& st = stats ? *stats : local;

    const size_t n_shards = manifest.shard_paths.size();
    const std::vector<uint32_t> shard_rank = lexicographic_ranks(manifest.shard_paths);

    // Phase 1: parse shards concurrently, routing records by journey hash.
    auto t0 = std::chrono::steady_clock::now();
    const uint32_t parse_workers =
        std::max<uint32_t>(1, std::min<uint64_t>(n_threads, std::max<size_t>(n_shards, 1)));
    RoutedBuckets routed(parse_workers, std::vector<std::vector<RoutedRecord>>(n_partitions));
    std::vector<std::map<ParseReason, uint64_t>> worker_rejects(parse_workers);
    std::vector<uint64_t> worker_rows(parse_workers, 0);

    {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (uint32_t w = 0; w < parse_workers; ++w) {
            pool.emplace_back([&, w] {
                for (size_t i = next.fetch_add(1); i < n_shards; i = next.fetch_add(1)) {
                    ShardData shard = read_shard(manifest.shard_paths[i]);
                    worker_rows[w] += shard.rows;
                    for (const auto& [reason, count] : shard.rejects)
                        worker_rejects[w][reason] += count;
                    for (size_t k = 0; k < shard.records.size(); ++k) {
                        const uint32_t p = static_cast<uint32_t>(
                            journey_hash(shard.records[k].journey_id) % n_partitions);
                        routed[w][p].push_back(RoutedRecord{std::move(shard.records[k]),
                                                            shard_rank[i],
                                                            shard.line_numbers[k]});
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (uint32_t w = 0; w < parse_workers; ++w) {
        st.rows_read += worker_rows[w];
        for (const auto& [reason, count] : worker_rejects[w])
            st.rejected[to_string(reason)] += count;
    }
    st.stage_seconds.emplace_back("parse", seconds_since(t0));

    return aggregate_routed(routed, spec, rules, n_partitions, n_threads, st);
}

std::vector<BatchFrame> run_pipeline_from_records(
    const std::vector<std::pair<CvRecord, RecordProvenance>>& records, const GridSpec& spec,
    const FilterRules& rules, uint32_t n_partitions, uint32_t n_threads, PipelineStats* stats) {
    spec.validate();
    if (n_partitions == 0) fail(Err::ZeroPartitions, "n_partitions must be >= 1");
    if (n_threads == 0) n_threads = default_thread_count();

    PipelineStats local;
    PipelineStats& st = stats ? *stats : local;

    std::vector<std::string> paths;
    paths.reserve(records.size());
    for (const auto& [_, prov] : records) paths.push_back(prov.shard_path);
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    auto t0 = std::chrono::steady_clock::now();
    const uint32_t route_workers = std::max<uint32_t>(1, n_threads);
    RoutedBuckets routed(route_workers, std::vector<std::vector<RoutedRecord>>(n_partitions));
    const size_t chunk = (records.size() + route_workers - 1) / std::max<size_t>(route_workers, 1);
    parallel_for(route_workers, n_threads, [&](uint64_t w) {
        const size_t lo = w * chunk;
        const size_t hi = std::min(records.size(), lo + chunk);
        for (size_t i = lo; i < hi; ++i) {
            const auto& [rec, prov] = records[i];
            const uint32_t rank = static_cast<uint32_t>(
                std::lower_bound(paths.begin(), paths.end(), prov.shard_path) - paths.begin());
            const uint32_t p =
                static_cast<uint32_t>(journey_hash(rec.journey_id) % n_partitions);
            routed[w][p].push_back(
                RoutedRecord{rec, rank, static_cast<uint32_t>(prov.line_number)});
        }
    });
    st.rows_read = records.size();
    st.stage_seconds.emplace_back("route", seconds_since(t0));

    return aggregate_routed(routed, spec, rules, n_partitions, n_threads, st);
}

} // namespace cvl

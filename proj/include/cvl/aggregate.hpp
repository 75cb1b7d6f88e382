#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cvl/grid.hpp"
#include "cvl/records.hpp"

namespace cvl {

struct FilterRules {
    bool require_in_grid = true;
    double speed_ceiling = 250.0; // source units
    bool drop_missing = true;     // drop records with an empty journey id
};

struct FilterCounts {
    uint64_t out_of_grid = 0;
    uint64_t speed_ceiling = 0;
    uint64_t missing_field = 0;

    uint64_t total() const { return out_of_grid + speed_ceiling + missing_field; }
};

enum class DropReason { Keep, OutOfGrid, SpeedCeiling, MissingField };

DropReason filter_reason(const CvRecord& record, const GridSpec& spec, const FilterRules& rules);

std::vector<CvRecord> filter_records(std::vector<CvRecord> records, const GridSpec& spec,
                                     const FilterRules& rules, FilterCounts& counts);

// Materialized per-cell view, mostly for tests and inspection.
struct CellStats {
    double speed_sum = 0.0;
    uint64_t record_count = 0;
    std::set<std::string> journey_ids;
};

// All planes for one temporal bin. Planes are row-major R x C, row 0 at
// lat_min (south). volume == 0 implies speed == 0 at that cell.
struct BatchFrame {
    uint32_t t = 0;
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::array<std::vector<float>, 4> speed;        // mean speed per direction
    std::array<std::vector<uint32_t>, 4> volume;    // distinct journeys per direction
    std::array<std::vector<uint32_t>, 4> raw_count; // raw record counts (not serialized)

    static BatchFrame zeros(uint32_t t, const GridSpec& spec);
    // t, dims, speed bit patterns, and volumes; raw_count excluded.
    bool bitwise_equal(const BatchFrame& other) const;
};

// Mergeable per-cell statistics keyed by global unrolled index. Internally
// keyed by (cell, journey) so that unique-journey volume is exact and the
// per-cell speed sum can be folded in a canonical order at finalize time,
// which makes serialized output identical for every partitioning.
class PartialAggregate {
public:
    PartialAggregate() = default;
    explicit PartialAggregate(const GridSpec& spec) : grid_(spec) {}

    // Record must already have passed filters; throws OutOfBounds otherwise.
    void accumulate(const CvRecord& record);

    // Fold a precomputed (cell, journey) subtotal in: equivalent to
    // accumulating `count` records of that journey summing to speed_sum.
    void merge_entry(uint64_t g, std::string_view journey, double speed_sum, uint64_t count);

    // Keywise union: sums add, counts add, journey sets union. Throws
    // GridMismatch unless both sides share the same GridSpec.
    void merge_from(const PartialAggregate& other);

    BatchFrame finalize_batch(uint32_t t) const;
    std::vector<BatchFrame> finalize_day() const; // all T batches, in order

    CellStats cell_stats(uint64_t g) const;
    uint64_t records_seen() const { return records_seen_; }
    bool empty() const { return cells_.empty(); }
    size_t entry_count() const { return cells_.size(); }
    const GridSpec& grid() const { return grid_; }

private:
    struct Key {
        uint64_t g;
        std::string journey;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        size_t operator()(const Key& k) const;
    };
    struct JourneyStats {
        double speed_sum = 0.0;
        uint64_t count = 0;
    };

    void finalize_range(std::vector<const std::pair<const Key, JourneyStats>*>& sorted,
                        size_t begin, size_t end, std::vector<BatchFrame>& frames) const;

    GridSpec grid_;
    std::unordered_map<Key, JourneyStats, KeyHash> cells_;
    uint64_t records_seen_ = 0;
};

PartialAggregate merge(const PartialAggregate& a, const PartialAggregate& b);

struct PipelineStats {
    uint64_t rows_read = 0;
    uint64_t parsed = 0;
    uint64_t duplicates_dropped = 0;
    uint64_t conflicting_duplicates = 0; // duplicate keys whose payloads differed
    uint64_t accepted = 0;               // records that reached accumulation
    std::map<std::string, uint64_t> rejected;  // parse reason -> count
    std::map<std::string, uint64_t> filtered;  // filter reason -> count
    std::vector<std::pair<std::string, double>> stage_seconds;
};

// parse -> dedup -> filter -> partition -> accumulate -> merge -> finalize.
// Output is byte-identical for any n_partitions / shard order.
std::vector<BatchFrame> run_pipeline(const SourceManifest& manifest, const GridSpec& spec,
                                     const FilterRules& rules, uint32_t n_partitions,
                                     uint32_t n_threads = 0, PipelineStats* stats = nullptr);

// Same pipeline starting from already-parsed records (skips file I/O).
std::vector<BatchFrame> run_pipeline_from_records(
    const std::vector<std::pair<CvRecord, RecordProvenance>>& records, const GridSpec& spec,
    const FilterRules& rules, uint32_t n_partitions, uint32_t n_threads = 0,
    PipelineStats* stats = nullptr);

uint32_t default_thread_count();

} // namespace cvl

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cvl/records.hpp"

namespace cvl {

// Column positions resolved from a shard's header row. Matching is
// case-insensitive and ignores spaces/underscores, so "Journey Id" and
// "journey_id" both work. Extra columns (altitude, IMU, ...) are dropped.
struct ColumnMap {
    int journey_id = -1;
    int timestamp = -1;
    int latitude = -1;
    int longitude = -1;
    int postal_code = -1; // optional
    int speed = -1;
    int heading = -1;
    int n_columns = 0;

    bool complete() const {
        return journey_id >= 0 && timestamp >= 0 && latitude >= 0 && longitude >= 0 &&
               speed >= 0 && heading >= 0;
    }
};

std::optional<ColumnMap> parse_header(std::string_view header_line);

using ParseResult = std::variant<CvRecord, ParseRejection>;

// One data row -> record or typed rejection. Rejections are data, not
// failures; callers count them and continue.
ParseResult parse_record(std::string_view line, const ColumnMap& columns);

// Inverse of parse_record for valid records (field-level round trip).
std::string record_to_csv(const CvRecord& record);
std::string csv_header();

// All files under root_dir (recursive) whose filename matches the glob,
// in lexicographic path order. Throws MissingRoot. Zero matches is a
// warning condition for the caller, not an error here.
SourceManifest discover_shards(const std::string& root_dir, const std::string& glob = "*.csv");

struct ShardData {
    std::vector<CvRecord> records;
    std::vector<uint32_t> line_numbers; // parallel to records; 1-based, header excluded
    std::map<ParseReason, uint64_t> rejects;
    uint64_t rows = 0; // data rows seen (header excluded)
};

ShardData read_shard(const std::string& path); // throws Io if unreadable

// At most one record per (journey_id, timestamp); survivor is the minimum
// (shard_path, line_number). Output sorted by (journey_id, timestamp).
// conflicting_payloads, when given, counts duplicate keys whose rows differed.
std::vector<CvRecord> deduplicate(std::vector<std::pair<CvRecord, RecordProvenance>> records,
                                  uint64_t* conflicting_payloads = nullptr);

uint64_t journey_hash(std::string_view journey_id); // FNV-1a, stable across runs

// Content-addressed split: record -> journey_hash % n. Never depends on
// arrival order. Throws ZeroPartitions.
std::vector<std::vector<CvRecord>> partition(std::vector<CvRecord> records, uint32_t n_partitions);

} // namespace cvl

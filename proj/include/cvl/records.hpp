#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cvl/datetime.hpp"

namespace cvl {

// One telemetry row, canonicalized (heading 360 wrapped to 0).
struct CvRecord {
    std::string journey_id;
    Timestamp timestamp;
    double latitude = 0.0;  // degrees, [-90, 90]
    double longitude = 0.0; // degrees, [-180, 180]
    std::string postal_code; // opaque, unused by the math
    double speed = 0.0;   // source units, >= 0
    double heading = 0.0; // degrees, [0, 360)

    bool operator==(const CvRecord&) const = default;
};

// Where a row came from. (shard_path, line_number) is unique and totally
// ordered, which is what makes the dedup survivor rule order-free.
struct RecordProvenance {
    std::string shard_path;
    int64_t line_number = 0; // 1-based, header excluded

    auto operator<=>(const RecordProvenance&) const = default;
};

enum class ParseReason {
    BadTimestamp,
    BadNumeric,
    MissingField,
    RangeViolation,
    BadHeader,
};

const char* to_string(ParseReason reason);

struct ParseRejection {
    ParseReason reason;
};

struct SourceManifest {
    std::vector<std::string> shard_paths; // lexicographic
    uint64_t total_rows = 0;
    std::map<std::string, uint64_t> rejected_rows; // reason -> count

    uint64_t rejected_total() const {
        uint64_t n = 0;
        for (const auto& [_, c] : rejected_rows) n += c;
        return n;
    }
};

} // namespace cvl

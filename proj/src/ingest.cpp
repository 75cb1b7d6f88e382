#include "cvl/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "cvl/error.hpp"

namespace fs = std::filesystem;

namespace cvl {

const char* to_string(ParseReason reason) {
    switch (reason) {
    case ParseReason::BadTimestamp: return "BadTimestamp";
    case ParseReason::BadNumeric: return "BadNumeric";
    case ParseReason::MissingField: return "MissingField";
    case ParseReason::RangeViolation: return "RangeViolation";
    case ParseReason::BadHeader: return "BadHeader";
    }
    return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

// "Journey Id" / "journey_id" / "JOURNEYID" all normalize to "journeyid".
std::string normalize_name(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-' || c == '\t' || c == '\r') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Simple filename glob: '*' matches any run, '?' one character.
bool glob_match(std::string_view pattern, std::string_view name) {
    size_t p = 0, n = 0, star = std::string_view::npos, backtrack = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[n] || pattern[p] == '?')) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            backtrack = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++backtrack;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

} // namespace

std::optional<ColumnMap> parse_header(std::string_view header_line) {
    std::vector<std::string_view> fields;
    split_fields(header_line, fields);
    ColumnMap map;
    map.n_columns = static_cast<int>(fields.size());
    for (int i = 0; i < map.n_columns; ++i) {
        const std::string name = normalize_name(fields[static_cast<size_t>(i)]);
        if (name == "journeyid") map.journey_id = i;
        else if (name == "timestamp") map.timestamp = i;
        else if (name == "latitude") map.latitude = i;
        else if (name == "longitude") map.longitude = i;
        else if (name == "postalcode" || name == "zipcode") map.postal_code = i;
        else if (name == "speed") map.speed = i;
        else if (name == "heading") map.heading = i;
        // anything else (altitude, IMU, acceleration, ...) is dropped
    }
    if (!map.complete()) return std::nullopt;
    return map;
}

namespace {

ParseResult parse_record_impl(std::string_view line, const ColumnMap& columns,
                              std::vector<std::string_view>& fields) {
    split_fields(line, fields);

    auto field = [&](int idx) -> std::string_view {
        return idx >= 0 && idx < static_cast<int>(fields.size()) ? fields[static_cast<size_t>(idx)]
                                                                 : std::string_view{};
    };

    const std::string_view journey = field(columns.journey_id);
    const std::string_view ts_text = field(columns.timestamp);
    const std::string_view lat_text = field(columns.latitude);
    const std::string_view lon_text = field(columns.longitude);
    const std::string_view speed_text = field(columns.speed);
    const std::string_view heading_text = field(columns.heading);

    if (journey.empty() || ts_text.empty() || lat_text.empty() || lon_text.empty() ||
        speed_text.empty() || heading_text.empty())
        return ParseRejection{ParseReason::MissingField};

    const auto ts = Timestamp::parse(ts_text);
    if (!ts) return ParseRejection{ParseReason::BadTimestamp};

    CvRecord rec;
    rec.journey_id = std::string(journey);
    rec.timestamp = *ts;
    rec.postal_code = std::string(field(columns.postal_code));
    if (!parse_double(lat_text, rec.latitude) || !parse_double(lon_text, rec.longitude) ||
        !parse_double(speed_text, rec.speed) || !parse_double(heading_text, rec.heading))
        return ParseRejection{ParseReason::BadNumeric};

    if (rec.heading == 360.0) rec.heading = 0.0; // canonical wrap
    if (!(rec.latitude >= -90.0 && rec.latitude <= 90.0) ||
        !(rec.longitude >= -180.0 && rec.longitude <= 180.0) || !(rec.speed >= 0.0) ||
        !std::isfinite(rec.speed) || !(rec.heading >= 0.0 && rec.heading < 360.0))
        return ParseRejection{ParseReason::RangeViolation};

    return rec;
}

} // namespace

ParseResult parse_record(std::string_view line, const ColumnMap& columns) {
    std::vector<std::string_view> fields;
    return parse_record_impl(line, columns, fields);
}

std::string csv_header() {
    return "Journey Id,Timestamp,Latitude,Longitude,Postal Code,Speed,Heading";
}

std::string record_to_csv(const CvRecord& r) {
    // %.17g round-trips doubles exactly through parse_record
    char nums[160];
    std::snprintf(nums, sizeof(nums), "%.17g,%.17g,%s,%.17g,%.17g", r.latitude, r.longitude,
                  r.postal_code.c_str(), r.speed, r.heading);
    return r.journey_id + "," + r.timestamp.to_string() + "," + nums;
}

SourceManifest discover_shards(const std::string& root_dir, const std::string& glob) {
    std::error_code ec;
    if (!fs::exists(root_dir, ec) || !fs::is_directory(root_dir, ec))
        fail(Err::MissingRoot, root_dir);

    SourceManifest manifest;
    for (auto it = fs::recursive_directory_iterator(root_dir, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) fail(Err::Io, root_dir + ": " + ec.message());
        if (!it->is_regular_file()) continue;
        const std::string name = it->path().filename().string();
        if (glob_match(glob, name)) manifest.shard_paths.push_back(it->path().string());
    }
    std::sort(manifest.shard_paths.begin(), manifest.shard_paths.end());
    return manifest;
}

ShardData read_shard(const std::string& path) {
    // one bulk read, then split lines in memory
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::Io, "cannot open shard " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(Err::Io, "read failure on " + path);

    ShardData data;
    size_t pos = 0;
    auto next_line = [&](std::string_view& out) {
        if (pos >= text.size()) return false;
        const size_t nl = text.find('\n', pos);
        const size_t end = nl == std::string::npos ? text.size() : nl;
        out = std::string_view(text).substr(pos, end - pos);
        if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
        pos = end + 1;
        return true;
    };

    std::string_view line;
    if (!next_line(line)) return data; // empty file: zero rows, no header

    const auto columns = parse_header(line);
    if (!columns) {
        data.rejects[ParseReason::BadHeader] = 1;
        return data;
    }

    data.records.reserve(std::count(text.begin(), text.end(), '\n'));
    std::vector<std::string_view> scratch;
    uint32_t line_number = 0;
    while (next_line(line)) {
        ++line_number;
        if (line.empty()) continue;
        ++data.rows;
        ParseResult result = parse_record_impl(line, *columns, scratch);
        if (auto* rec = std::get_if<CvRecord>(&result)) {
            data.records.push_back(std::move(*rec));
            data.line_numbers.push_back(line_number);
        } else {
            ++data.rejects[std::get<ParseRejection>(result).reason];
        }
    }
    return data;
}

namespace {

struct DedupKey {
    std::string_view journey;
    int64_t epoch_sec;

    bool operator==(const DedupKey&) const = default;
};

struct DedupKeyHash {
    size_t operator()(const DedupKey& k) const {
        uint64_t h = 1469598103934665603ull;
        for (char c : k.journey) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        for (int i = 0; i < 8; ++i)
            h = (h ^ ((static_cast<uint64_t>(k.epoch_sec) >> (8 * i)) & 0xff)) * 1099511628211ull;
        return static_cast<size_t>(h);
    }
};

} // namespace

std::vector<CvRecord> deduplicate(std::vector<std::pair<CvRecord, RecordProvenance>> records,
                                  uint64_t* conflicting_payloads) {
    std::unordered_map<DedupKey, size_t, DedupKeyHash> best;
    best.reserve(records.size());
    uint64_t conflicts = 0;

    for (size_t i = 0; i < records.size(); ++i) {
        const DedupKey key{records[i].first.journey_id, records[i].first.timestamp.epoch_sec};
        auto [it, inserted] = best.try_emplace(key, i);
        if (inserted) continue;
        if (records[i].first != records[it->second].first) ++conflicts;
        if (records[i].second < records[it->second].second) it->second = i;
    }

    std::vector<CvRecord> out;
    out.reserve(best.size());
    for (const auto& [_, idx] : best) out.push_back(std::move(records[idx].first));
    std::sort(out.begin(), out.end(), [](const CvRecord& a, const CvRecord& b) {
        if (a.journey_id != b.journey_id) return a.journey_id < b.journey_id;
        return a.timestamp < b.timestamp;
    });
    if (conflicting_payloads) *conflicting_payloads = conflicts;
    return out;
}

uint64_t journey_hash(std::string_view journey_id) {
    uint64_t h = 1469598103934665603ull;
    for (char c : journey_id) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
    return h;
}

std::vector<std::vector<CvRecord>> partition(std::vector<CvRecord> records,
                                             uint32_t n_partitions) {
    if (n_partitions == 0) fail(Err::ZeroPartitions, "n_partitions must be >= 1");
    std::vector<std::vector<CvRecord>> parts(n_partitions);
    for (auto& rec : records) {
        parts[journey_hash(rec.journey_id) % n_partitions].push_back(std::move(rec));
    }
    return parts;
}

} // namespace cvl

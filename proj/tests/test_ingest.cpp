#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "cvl/error.hpp"
#include "cvl/ingest.hpp"

using namespace cvl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cvl_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }
};

ColumnMap table1_columns() { return *parse_header(csv_header()); }

} // namespace

TEST_CASE("discover_shards returns lexicographic order") {
    TempDir dir;
    dir.file("b.csv", "x");
    dir.file("a.csv", "x");
    const auto manifest = discover_shards(dir.path.string());
    REQUIRE(manifest.shard_paths.size() == 2);
    CHECK(fs::path(manifest.shard_paths[0]).filename() == "a.csv");
    CHECK(fs::path(manifest.shard_paths[1]).filename() == "b.csv");
    CHECK(manifest.total_rows == 0);
    CHECK(manifest.rejected_total() == 0);
}

TEST_CASE("discover_shards empty dir and glob filtering") {
    TempDir dir;
    CHECK(discover_shards(dir.path.string()).shard_paths.empty());

    dir.file("one.csv", "");
    dir.file("two.csv", "");
    dir.file("three.csv", "");
    dir.file("notes.txt", "");
    CHECK(discover_shards(dir.path.string(), "*.csv").shard_paths.size() == 3);
    CHECK(discover_shards(dir.path.string(), "t*.csv").shard_paths.size() == 2);

    CHECK_THROWS_AS(discover_shards((dir.path / "missing").string()), CvlError);
}

TEST_CASE("discover_shards walks subdirectories") {
    TempDir dir;
    fs::create_directories(dir.path / "2021-05-09");
    std::ofstream(dir.path / "2021-05-09" / "x.csv") << "";
    dir.file("y.csv", "");
    CHECK(discover_shards(dir.path.string()).shard_paths.size() == 2);
}

TEST_CASE("header mapping is case- and separator-insensitive") {
    CHECK(parse_header("Journey Id,Timestamp,Latitude,Longitude,Postal Code,Speed,Heading"));
    CHECK(parse_header("journey_id,timestamp,latitude,longitude,postal_code,speed,heading"));
    CHECK(parse_header("JOURNEYID,TIMESTAMP,LATITUDE,LONGITUDE,POSTALCODE,SPEED,HEADING"));
    // extra columns are fine, missing required ones are not
    CHECK(parse_header("Journey Id,Timestamp,Latitude,Longitude,Altitude,Postal Code,Speed,Heading"));
    CHECK_FALSE(parse_header("Journey Id,Timestamp,Latitude,Longitude,Postal Code,Speed"));
    CHECK_FALSE(parse_header(""));
}

TEST_CASE("parse_record accepts the Table-1 row") {
    const auto result = parse_record(
        "33456rd,2021-05-09 03:48:42,37.664087,-92.6546,65536,105.98,33", table1_columns());
    REQUIRE(std::holds_alternative<CvRecord>(result));
    const auto& rec = std::get<CvRecord>(result);
    CHECK(rec.journey_id == "33456rd");
    CHECK(rec.timestamp.to_string() == "2021-05-09 03:48:42");
    CHECK(rec.latitude == doctest::Approx(37.664087));
    CHECK(rec.longitude == doctest::Approx(-92.6546));
    CHECK(rec.postal_code == "65536");
    CHECK(rec.speed == doctest::Approx(105.98));
    CHECK(rec.heading == doctest::Approx(33.0));
}

TEST_CASE("parse_record canonicalizes and rejects") {
    const ColumnMap cols = table1_columns();
    auto reason = [&](const std::string& line) {
        const auto r = parse_record(line, cols);
        REQUIRE(std::holds_alternative<ParseRejection>(r));
        return std::get<ParseRejection>(r).reason;
    };

    // heading 360 wraps to 0
    const auto wrapped =
        parse_record("a,2021-05-09 00:00:00,37.0,-92.0,65536,10,360", cols);
    CHECK(std::get<CvRecord>(wrapped).heading == 0.0);

    CHECK(reason("a,2021-05-09 00:00:00,37.0,-92.0,65536,-5,33") == ParseReason::RangeViolation);
    CHECK(reason("a,2021-05-09 00:00:00,37.0,-92.0,65536,10,361") == ParseReason::RangeViolation);
    CHECK(reason("a,2021-05-09 00:00:00,95.0,-92.0,65536,10,33") == ParseReason::RangeViolation);
    CHECK(reason("a,2021-05-09 00:00:00,37.0,-192.0,65536,10,33") == ParseReason::RangeViolation);
    CHECK(reason("a,2021/05/09 00:00:00,37.0,-92.0,65536,10,33") == ParseReason::BadTimestamp);
    CHECK(reason("a,2021-05-09 00:00:00,abc,-92.0,65536,10,33") == ParseReason::BadNumeric);
    CHECK(reason("a,2021-05-09 00:00:00,37.0,-92.0,65536,10") == ParseReason::MissingField);
    CHECK(reason(",2021-05-09 00:00:00,37.0,-92.0,65536,10,33") == ParseReason::MissingField);
}

TEST_CASE("parse_record of record_to_csv is the identity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180), speed(0, 300),
        heading(0, 360);
    const ColumnMap cols = table1_columns();
    for (int i = 0; i < 200; ++i) {
        CvRecord rec;
        rec.journey_id = "j" + std::to_string(rng() % 100000);
        rec.timestamp = Timestamp{static_cast<int64_t>(rng() % 4102444800ull)};
        rec.latitude = lat(rng);
        rec.longitude = lon(rng);
        rec.postal_code = std::to_string(rng() % 99999);
        rec.speed = speed(rng);
        const double h = heading(rng);
        rec.heading = h == 360.0 ? 0.0 : h;
        const auto parsed = parse_record(record_to_csv(rec), cols);
        REQUIRE(std::holds_alternative<CvRecord>(parsed));
        CHECK(std::get<CvRecord>(parsed) == rec);
    }
}

TEST_CASE("read_shard counts rows and rejects") {
    TempDir dir;
    const std::string path = dir.file("s.csv", csv_header() + "\n" +
                                                   "a,2021-05-09 00:00:00,37.0,-92.0,1,10,33\n" +
                                                   "bad line with,no real,fields,1,2,3,4\n" +
                                                   "b,2021-05-09 00:00:01,37.0,-92.0,1,10,33\n");
    const ShardData shard = read_shard(path);
    CHECK(shard.rows == 3);
    CHECK(shard.records.size() == 2);
    CHECK(shard.line_numbers == std::vector<uint32_t>{1, 3});
    CHECK(shard.rejects.size() == 1);

    const std::string bad_header = dir.file("h.csv", "nope,nope\n1,2\n");
    CHECK(read_shard(bad_header).rejects.count(ParseReason::BadHeader) == 1);

    CHECK_THROWS_AS(read_shard((dir.path / "missing.csv").string()), CvlError);
}

namespace {

CvRecord make_rec(const std::string& journey, const std::string& ts, double speed = 10.0) {
    CvRecord rec;
    rec.journey_id = journey;
    rec.timestamp = *Timestamp::parse(ts);
    rec.latitude = 37.0;
    rec.longitude = -92.0;
    rec.speed = speed;
    rec.heading = 33.0;
    return rec;
}

} // namespace

TEST_CASE("deduplicate drops the Table-1 duplicate") {
    std::vector<std::pair<CvRecord, RecordProvenance>> rows;
    rows.emplace_back(make_rec("33456rd", "2021-05-09 03:48:42", 105.98), RecordProvenance{"t", 1});
    rows.emplace_back(make_rec("31224tf", "2021-05-09 03:49:42", 0.0), RecordProvenance{"t", 2});
    rows.emplace_back(make_rec("22124fs", "2021-05-09 03:49:49", 48.38), RecordProvenance{"t", 3});
    rows.emplace_back(make_rec("33456rd", "2021-05-09 03:48:42", 105.98), RecordProvenance{"t", 4});
    uint64_t conflicts = 99;
    const auto out = deduplicate(rows, &conflicts);
    CHECK(out.size() == 3);
    CHECK(conflicts == 0); // identical payloads
}

TEST_CASE("deduplicate is the identity on unique keys") {
    std::vector<std::pair<CvRecord, RecordProvenance>> rows;
    for (int i = 0; i < 10; ++i)
        rows.emplace_back(make_rec("j", "2021-05-09 00:00:0" + std::to_string(i)),
                          RecordProvenance{"t", i + 1});
    CHECK(deduplicate(rows).size() == 10);
}

TEST_CASE("dedup survivor is the minimum provenance, arrival order ignored") {
    const auto a5 = make_rec("j", "2021-05-09 00:00:00", 1.0);
    const auto b2 = make_rec("j", "2021-05-09 00:00:00", 2.0);

    std::vector<std::pair<CvRecord, RecordProvenance>> forward;
    forward.emplace_back(a5, RecordProvenance{"a.csv", 5});
    forward.emplace_back(b2, RecordProvenance{"b.csv", 2});
    std::vector<std::pair<CvRecord, RecordProvenance>> reversed;
    reversed.emplace_back(b2, RecordProvenance{"b.csv", 2});
    reversed.emplace_back(a5, RecordProvenance{"a.csv", 5});

    uint64_t conflicts = 0;
    const auto out1 = deduplicate(forward, &conflicts);
    CHECK(conflicts == 1); // payloads differ
    const auto out2 = deduplicate(reversed);
    REQUIRE(out1.size() == 1);
    CHECK(out1[0].speed == 1.0); // a.csv line 5 wins
    CHECK(out1 == out2);         // arrival order is irrelevant
}

TEST_CASE("partition conserves records and is deterministic") {
    std::vector<CvRecord> records;
    for (int i = 0; i < 100; ++i)
        records.push_back(make_rec("j" + std::to_string(i % 37), "2021-05-09 00:00:00"));

    const auto single = partition(records, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].size() == 100);

    const auto parts = partition(records, 4);
    size_t total = 0;
    for (const auto& p : parts) total += p.size();
    CHECK(total == 100);

    // same input, same n -> identical assignment, journeys never split
    const auto again = partition(records, 4);
    for (size_t p = 0; p < 4; ++p) {
        CHECK(parts[p] == again[p]);
        for (const auto& rec : parts[p]) CHECK(journey_hash(rec.journey_id) % 4 == p);
    }

    CHECK_THROWS_AS(partition(records, 0), CvlError);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "cvl/error.hpp"
#include "cvl/grid.hpp"

using namespace cvl;

namespace {

GridSpec small_grid() {
    GridSpec spec;
    spec.lat_min = 36.0;
    spec.lat_max = 36.1;
    spec.lon_min = -93.0;
    spec.lon_max = -92.8;
    spec.lat_step = 0.01;
    spec.lon_step = 0.01;
    return spec; // 10 x 20
}

Timestamp ts(const char* text) { return *Timestamp::parse(text); }

} // namespace

TEST_CASE("derived dimensions") {
    const GridSpec spec = small_grid();
    CHECK(spec.rows() == 10);
    CHECK(spec.cols() == 20);
    CHECK(spec.batches() == 288);   // min_step 5
    CHECK(spec.directions() == 4);  // dxn_step 90
    CHECK(spec.cell_count() == 288ull * 4 * 10 * 20);

    GridSpec one_cell = spec;
    one_cell.lat_step = 10.0;
    one_cell.lon_step = 10.0;
    CHECK(one_cell.rows() == 1);
    CHECK(one_cell.cols() == 1);
}

TEST_CASE("spec validation") {
    GridSpec bad = small_grid();
    bad.lat_max = bad.lat_min;
    CHECK_THROWS_AS(bad.validate(), CvlError);

    bad = small_grid();
    bad.min_step = 7; // does not divide 1440
    CHECK_THROWS_AS(bad.validate(), CvlError);

    bad = small_grid();
    bad.dxn_step = 100;
    CHECK_THROWS_AS(bad.validate(), CvlError);

    bad = small_grid();
    bad.lat_step = 0.0;
    CHECK_THROWS_AS(bad.validate(), CvlError);

    CHECK_NOTHROW(small_grid().validate());
}

TEST_CASE("lat_bin") {
    GridSpec spec = small_grid();
    spec.lat_max = 38.0; // room for the Table-1 latitude
    CHECK(lat_bin(37.664087, spec) == 166);
    CHECK(lat_bin(spec.lat_min, spec) == 0);
    CHECK(lat_bin(spec.lat_max, spec) == spec.rows() - 1); // clamp at the inclusive top
    CHECK_THROWS_AS(lat_bin(spec.lat_min - 0.001, spec), CvlError);
    CHECK_THROWS_AS(lat_bin(spec.lat_max + 0.5, spec), CvlError);
}

TEST_CASE("lon_bin") {
    const GridSpec spec = small_grid();
    CHECK(lon_bin(-92.6546, GridSpec{.lon_min = -93.0, .lon_max = -92.0, .lon_step = 0.01}) == 34);
    CHECK(lon_bin(spec.lon_min, spec) == 0);
    CHECK_THROWS_AS(lon_bin(spec.lon_max + 0.5, spec), CvlError);
}

TEST_CASE("time_bin") {
    const GridSpec spec = small_grid();
    CHECK(time_bin(ts("2021-05-09 03:48:42"), spec) == 45);
    CHECK(time_bin(ts("2021-05-09 00:00:00"), spec) == 0);
    CHECK(time_bin(ts("2021-05-09 23:59:59"), spec) == 287);

    GridSpec hourly = spec;
    hourly.min_step = 60;
    CHECK(time_bin(ts("2021-05-09 03:48:42"), hourly) == 3);
    CHECK(hourly.batches() == 24);
}

TEST_CASE("dxn_bin") {
    const GridSpec spec = small_grid();
    CHECK(dxn_bin(33.0, spec) == 0);
    CHECK(dxn_bin(90.0, spec) == 1); // boundary belongs to the upper bin
    CHECK(dxn_bin(359.9, spec) == 3);
    CHECK(dxn_bin(0.0, spec) == 0);
    CHECK(dxn_bin(269.999, spec) == 2);

    GridSpec rotated = spec;
    rotated.dxn_offset = 45.0; // compass-centered quadrants
    CHECK(dxn_bin(0.0, rotated) == 0);    // due north
    CHECK(dxn_bin(350.0, rotated) == 0);  // still north
    CHECK(dxn_bin(46.0, rotated) == 1);   // east
    CHECK(dxn_bin(180.0, rotated) == 2);  // south
    CHECK(dxn_bin(270.0, rotated) == 3);  // west
}

TEST_CASE("global index layout") {
    GridSpec spec = small_grid(); // D=4, R=10, C=20
    CHECK(global_index(CellIndex{0, 0, 0, 0}, spec) == 0);
    CHECK(global_index(CellIndex{1, 2, 3, 4}, spec) == 1264);
    const CellIndex last{spec.batches() - 1, 3, 9, 19};
    CHECK(global_index(last, spec) == spec.cell_count() - 1);
    CHECK_THROWS_AS(global_index(CellIndex{0, 4, 0, 0}, spec), CvlError);
    CHECK_THROWS_AS(global_index(CellIndex{spec.batches(), 0, 0, 0}, spec), CvlError);
}

TEST_CASE("decompose inverts global_index") {
    const GridSpec spec = small_grid();
    CHECK(decompose(0, spec) == CellIndex{0, 0, 0, 0});
    CHECK(decompose(1264, spec) == CellIndex{1, 2, 3, 4});
    CHECK_THROWS_AS(decompose(spec.cell_count(), spec), CvlError);
}

TEST_CASE("round trip is the identity over the full index space") {
    // exhaustive on a small grid
    GridSpec spec = small_grid();
    spec.min_step = 480; // T = 3
    for (uint64_t g = 0; g < spec.cell_count(); ++g)
        CHECK(global_index(decompose(g, spec), spec) == g);

    // randomized on the full-size grid
    const GridSpec big = small_grid();
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<uint64_t> dist(0, big.cell_count() - 1);
    for (int i = 0; i < 20000; ++i) {
        const uint64_t g = dist(rng);
        CHECK(global_index(decompose(g, big), big) == g);
    }
}

TEST_CASE("bin-edge law: every f64-computed edge lands in its own bin") {
    for (const double step : {0.01, 0.1, 0.013, 0.007}) {
        GridSpec spec = small_grid();
        spec.lat_min = -100.0;
        spec.lat_max = -100.0 + 300 * step;
        spec.lat_step = step;
        const uint32_t R = spec.rows();
        for (uint32_t k = 0; k < R; ++k) {
            const double edge = spec.lat_min + k * step;
            CHECK(lat_bin(edge, spec) == k);
            // and the interior of the bin too
            CHECK(lat_bin(edge + step * 0.5, spec) == k);
        }
    }
}

TEST_CASE("binning is monotonic in latitude") {
    const GridSpec spec = small_grid();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(spec.lat_min, spec.lat_max);
    for (int i = 0; i < 5000; ++i) {
        double a = dist(rng), b = dist(rng);
        if (a > b) std::swap(a, b);
        CHECK(lat_bin(a, spec) <= lat_bin(b, spec));
    }
    CHECK(lat_bin(36.05, spec) == lat_bin(36.05, spec)); // equal inputs, equal bins
}

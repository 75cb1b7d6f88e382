#include "cvl/grid.hpp"

#include <cmath>
#include <string>

#include "cvl/error.hpp"

namespace cvl {

double snap_to_integer(double q) {
    const double r = std::nearbyint(q);
    if (std::fabs(q - r) <= 1e-9 * std::fmax(1.0, std::fabs(r))) return r;
    return q;
}

namespace {

uint32_t extent_bins(double lo, double hi, double step) {
    const double q = snap_to_integer((hi - lo) / step);
    const double n = std::ceil(q);
    return n < 1.0 ? 1u : static_cast<uint32_t>(n);
}

// floor((x - lo) / step) with edge snap, clamped to [0, n-1]; x == hi maps to
// the last bin rather than falling off it.
uint32_t linear_bin(double x, double lo, double hi, double step, uint32_t n, const char* axis) {
    if (!(x >= lo && x <= hi))
        fail(Err::OutOfBounds, std::string(axis) + " " + std::to_string(x) + " outside [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const double q = snap_to_integer((x - lo) / step);
    double b = std::floor(q);
    if (b < 0.0) b = 0.0;
    const double last = static_cast<double>(n - 1);
    if (b > last) b = last;
    return static_cast<uint32_t>(b);
}

} // namespace

uint32_t GridSpec::rows() const { return extent_bins(lat_min, lat_max, lat_step); }
uint32_t GridSpec::cols() const { return extent_bins(lon_min, lon_max, lon_step); }

uint64_t GridSpec::cell_count() const {
    return static_cast<uint64_t>(batches()) * directions() * rows() * cols();
}

void GridSpec::validate() const {
    if (!(lat_min < lat_max)) fail(Err::BadGrid, "lat_min must be < lat_max");
    if (!(lon_min < lon_max)) fail(Err::BadGrid, "lon_min must be < lon_max");
    if (!(lat_step > 1e-9) || !(lon_step > 1e-9))
        fail(Err::BadGrid, "lat_step/lon_step must be > 1e-9");
    if (min_step == 0 || 1440 % min_step != 0)
        fail(Err::BadGrid, "min_step must divide 1440");
    if (dxn_step == 0 || 360 % dxn_step != 0)
        fail(Err::BadGrid, "dxn_step must divide 360");
    if (!std::isfinite(dxn_offset)) fail(Err::BadGrid, "dxn_offset must be finite");
}

uint32_t lat_bin(double latitude, const GridSpec& spec) {
    return linear_bin(latitude, spec.lat_min, spec.lat_max, spec.lat_step, spec.rows(),
                      "latitude");
}

uint32_t lon_bin(double longitude, const GridSpec& spec) {
    return linear_bin(longitude, spec.lon_min, spec.lon_max, spec.lon_step, spec.cols(),
                      "longitude");
}

uint32_t time_bin(Timestamp ts, const GridSpec& spec) {
    return static_cast<uint32_t>(ts.minute_of_day()) / spec.min_step;
}

uint32_t dxn_bin(double heading, const GridSpec& spec) {
    double h = heading + spec.dxn_offset;
    h = std::fmod(h, 360.0);
    if (h < 0.0) h += 360.0;
    const double q = snap_to_integer(h / static_cast<double>(spec.dxn_step));
    // Direction is circular: a heading that snaps up to 360 wraps back to bin 0.
    const uint32_t d = static_cast<uint32_t>(std::floor(q));
    return d % spec.directions();
}

uint64_t global_index(CellIndex cell, const GridSpec& spec) {
    const uint64_t T = spec.batches(), D = spec.directions(), R = spec.rows(), C = spec.cols();
    if (cell.t >= T || cell.d >= D || cell.r >= R || cell.c >= C)
        fail(Err::ComponentOutOfRange, "cell (" + std::to_string(cell.t) + "," +
                                           std::to_string(cell.d) + "," + std::to_string(cell.r) +
                                           "," + std::to_string(cell.c) + ")");
    return ((static_cast<uint64_t>(cell.t) * D + cell.d) * R + cell.r) * C + cell.c;
}

CellIndex decompose(uint64_t g, const GridSpec& spec) {
    const uint64_t D = spec.directions(), R = spec.rows(), C = spec.cols();
    if (g >= spec.cell_count())
        fail(Err::IndexOverflow, "global index " + std::to_string(g) + " >= " +
                                     std::to_string(spec.cell_count()));
    CellIndex cell;
    cell.c = static_cast<uint32_t>(g % C);
    g /= C;
    cell.r = static_cast<uint32_t>(g % R);
    g /= R;
    cell.d = static_cast<uint32_t>(g % D);
    cell.t = static_cast<uint32_t>(g / D);
    return cell;
}

std::string direction_label(uint32_t d, const GridSpec& spec) {
    static constexpr const char* kCardinal[4] = {"N", "E", "S", "W"};
    if (spec.directions() == 4 && d < 4) return kCardinal[d];
    return std::to_string(d);
}

} // namespace cvl

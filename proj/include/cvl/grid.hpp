#pragma once

#include <cstdint>
#include <string>

#include "cvl/datetime.hpp"

namespace cvl {

struct CellIndex {
    uint32_t t = 0; // temporal bin, [0, T)
    uint32_t d = 0; // direction bin, [0, D)
    uint32_t r = 0; // row (latitude) bin, [0, R)
    uint32_t c = 0; // col (longitude) bin, [0, C)

    bool operator==(const CellIndex&) const = default;
};

// The full discretization contract. Row 0 corresponds to lat_min (south);
// rendering flips vertically so north ends up at the top of the image.
struct GridSpec {
    double lat_min = 36.0;
    double lat_max = 40.6;
    double lon_min = -95.8;
    double lon_max = -89.1;
    double lat_step = 0.1;
    double lon_step = 0.1;
    uint32_t min_step = 5;  // minutes per temporal bin; must divide 1440
    uint32_t dxn_step = 90; // degrees per direction bin; must divide 360
    double dxn_offset = 0.0; // heading rotation; 45 centers quadrants on N/E/S/W

    uint32_t rows() const;
    uint32_t cols() const;
    uint32_t batches() const { return 1440 / min_step; }
    uint32_t directions() const { return 360 / dxn_step; }
    uint64_t cell_count() const;

    void validate() const; // throws BadGrid on any invariant violation

    bool operator==(const GridSpec&) const = default;
};

// Quotients within 1e-9 (relative) of an integer snap onto it before the
// floor/ceil. Bin edges computed in f64 as min + k*step land a few ulp shy of
// k/step; raw floor would misplace them one bin low.
double snap_to_integer(double q);

uint32_t lat_bin(double latitude, const GridSpec& spec);  // throws OutOfBounds
uint32_t lon_bin(double longitude, const GridSpec& spec); // throws OutOfBounds
uint32_t time_bin(Timestamp ts, const GridSpec& spec);
uint32_t dxn_bin(double heading, const GridSpec& spec); // heading canonical [0,360)

uint64_t global_index(CellIndex cell, const GridSpec& spec); // throws ComponentOutOfRange
CellIndex decompose(uint64_t g, const GridSpec& spec);       // throws IndexOverflow

// "N","E","S","W" when D == 4, else the bin number.
std::string direction_label(uint32_t d, const GridSpec& spec);

} // namespace cvl

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "cvl/aggregate.hpp"
#include "cvl/bench.hpp"
#include "cvl/cli.hpp"
#include "cvl/error.hpp"
#include "cvl/grid.hpp"
#include "cvl/ingest.hpp"
#include "cvl/lattice_store.hpp"
#include "cvl/normalize.hpp"
#include "cvl/synth.hpp"

namespace py = pybind11;
using namespace cvl;

namespace {

Timestamp parse_ts_or_throw(const std::string& text) {
    const auto ts = Timestamp::parse(text);
    if (!ts) throw py::value_error("expected 'YYYY-MM-DD HH:MM:SS', got '" + text + "'");
    return *ts;
}

py::dict stats_to_dict(const PipelineStats& stats) {
    py::dict out;
    out["rows_read"] = stats.rows_read;
    out["parsed"] = stats.parsed;
    out["duplicates_dropped"] = stats.duplicates_dropped;
    out["conflicting_duplicates"] = stats.conflicting_duplicates;
    out["accepted"] = stats.accepted;
    py::dict rejected, filtered, stages;
    for (const auto& [k, v] : stats.rejected) rejected[py::str(k)] = v;
    for (const auto& [k, v] : stats.filtered) filtered[py::str(k)] = v;
    for (const auto& [k, v] : stats.stage_seconds) stages[py::str(k)] = v;
    out["rejected"] = rejected;
    out["filtered"] = filtered;
    out["stage_seconds"] = stages;
    return out;
}

// frames -> (speed[T,4,R,C] float32, volume[T,4,R,C] uint32)
std::pair<py::array_t<float>, py::array_t<uint32_t>> frames_to_arrays(
    const std::vector<BatchFrame>& frames) {
    const size_t T = frames.size();
    const size_t R = T ? frames[0].rows : 0;
    const size_t C = T ? frames[0].cols : 0;
    py::array_t<float> speed({T, size_t{4}, R, C});
    py::array_t<uint32_t> volume({T, size_t{4}, R, C});
    auto s = speed.mutable_unchecked<4>();
    auto v = volume.mutable_unchecked<4>();
    for (size_t t = 0; t < T; ++t)
        for (size_t d = 0; d < 4; ++d)
            for (size_t r = 0; r < R; ++r)
                for (size_t c = 0; c < C; ++c) {
                    s(t, d, r, c) = frames[t].speed[d][r * C + c];
                    v(t, d, r, c) = frames[t].volume[d][r * C + c];
                }
    return {speed, volume};
}

} // namespace

PYBIND11_MODULE(_cvlattice, m) {
    m.doc() = "Connected-vehicle telemetry -> spatio-temporal lattice toolkit";

    py::register_exception<CvlError>(m, "CvlError");

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double lat_min, double lat_max, double lon_min, double lon_max,
                         double lat_step, double lon_step, uint32_t min_step, uint32_t dxn_step,
                         double dxn_offset) {
                 GridSpec spec{lat_min, lat_max, lon_min, lon_max,
                               lat_step, lon_step, min_step, dxn_step, dxn_offset};
                 spec.validate();
                 return spec;
             }),
             py::arg("lat_min") = 36.0, py::arg("lat_max") = 40.6, py::arg("lon_min") = -95.8,
             py::arg("lon_max") = -89.1, py::arg("lat_step") = 0.1, py::arg("lon_step") = 0.1,
             py::arg("min_step") = 5, py::arg("dxn_step") = 90, py::arg("dxn_offset") = 0.0)
        .def_readonly("lat_min", &GridSpec::lat_min)
        .def_readonly("lat_max", &GridSpec::lat_max)
        .def_readonly("lon_min", &GridSpec::lon_min)
        .def_readonly("lon_max", &GridSpec::lon_max)
        .def_readonly("lat_step", &GridSpec::lat_step)
        .def_readonly("lon_step", &GridSpec::lon_step)
        .def_readonly("min_step", &GridSpec::min_step)
        .def_readonly("dxn_step", &GridSpec::dxn_step)
        .def_property_readonly("rows", &GridSpec::rows)
        .def_property_readonly("cols", &GridSpec::cols)
        .def_property_readonly("batches", &GridSpec::batches)
        .def_property_readonly("directions", &GridSpec::directions)
        .def("cell_count", &GridSpec::cell_count);

    m.def("lat_bin", &lat_bin, py::arg("latitude"), py::arg("spec"));
    m.def("lon_bin", &lon_bin, py::arg("longitude"), py::arg("spec"));
    m.def(
        "time_bin",
        [](const std::string& ts, const GridSpec& spec) {
            return time_bin(parse_ts_or_throw(ts), spec);
        },
        py::arg("timestamp"), py::arg("spec"));
    m.def("dxn_bin", &dxn_bin, py::arg("heading"), py::arg("spec"));
    m.def(
        "global_index",
        [](uint32_t t, uint32_t d, uint32_t r, uint32_t c, const GridSpec& spec) {
            return global_index(CellIndex{t, d, r, c}, spec);
        },
        py::arg("t"), py::arg("d"), py::arg("r"), py::arg("c"), py::arg("spec"));
    m.def(
        "decompose",
        [](uint64_t g, const GridSpec& spec) {
            const CellIndex cell = decompose(g, spec);
            return py::make_tuple(cell.t, cell.d, cell.r, cell.c);
        },
        py::arg("g"), py::arg("spec"));

    m.def(
        "generate_day",
        [](const std::string& out_dir, uint64_t seed, uint32_t journeys, uint32_t shards,
           double sample_period, double mean_duration, const std::string& day) {
            SynthConfig cfg;
            cfg.out_dir = out_dir;
            cfg.seed = seed;
            cfg.n_journeys = journeys;
            cfg.n_shards = shards;
            cfg.sample_period = sample_period;
            cfg.mean_duration = mean_duration;
            cfg.day = day;
            const SourceManifest manifest = generate_day(cfg);
            py::dict out;
            out["shards"] = manifest.shard_paths;
            out["total_rows"] = manifest.total_rows;
            return out;
        },
        py::arg("out_dir"), py::arg("seed") = 0, py::arg("journeys") = 100,
        py::arg("shards") = 8, py::arg("sample_period") = 1.0, py::arg("mean_duration") = 300.0,
        py::arg("day") = "2021-05-09");

    m.def(
        "process_day",
        [](const std::string& input_dir, const std::string& out_path, const GridSpec& spec,
           uint32_t partitions, uint32_t threads, const std::string& day) {
            const SourceManifest manifest = discover_shards(input_dir);
            PipelineStats stats;
            const auto frames = run_pipeline(manifest, spec, FilterRules{}, partitions, threads,
                                             &stats);
            int32_t day_number = 0;
            if (!day.empty()) {
                const auto parsed = Timestamp::parse_day(day);
                if (!parsed) throw py::value_error("bad day '" + day + "'");
                day_number = *parsed;
            }
            const uint64_t bytes = write_container(frames, spec, day_number, out_path);
            py::dict out = stats_to_dict(stats);
            out["bytes_written"] = bytes;
            return out;
        },
        py::arg("input_dir"), py::arg("out_path"), py::arg("spec") = GridSpec{},
        py::arg("partitions") = 0, py::arg("threads") = 0, py::arg("day") = "2021-05-09");

    m.def(
        "read_container",
        [](const std::string& path) {
            auto [header, frames] = read_container(path);
            auto [speed, volume] = frames_to_arrays(frames);
            py::dict h;
            h["version"] = header.version;
            h["lat_min"] = header.lat_min;
            h["lat_step"] = header.lat_step;
            h["lon_min"] = header.lon_min;
            h["lon_step"] = header.lon_step;
            h["rows"] = header.rows;
            h["cols"] = header.cols;
            h["min_step"] = header.min_step;
            h["dxn_step"] = header.dxn_step;
            h["n_batches"] = header.n_batches;
            h["day"] = header.day;
            return py::make_tuple(h, speed, volume);
        },
        py::arg("path"));

    m.def(
        "normalize_speed",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> plane,
           double speed_max) {
            NormalizationSpec spec;
            spec.speed_max = speed_max;
            const auto in = plane.request();
            const auto out = normalize_speed(
                {static_cast<const float*>(in.ptr), static_cast<size_t>(in.size)}, spec);
            py::array_t<uint8_t> result(in.shape);
            std::memcpy(result.mutable_data(), out.data(), out.size());
            return result;
        },
        py::arg("plane"), py::arg("speed_max") = 128.0);

    m.def(
        "normalize_volume",
        [](py::array_t<uint32_t, py::array::c_style | py::array::forcecast> plane,
           const std::string& mode, double cap) {
            NormalizationSpec spec;
            spec.volume_mode = volume_mode_from_string(mode);
            spec.volume_cap = cap;
            const auto in = plane.request();
            const auto out = normalize_volume(
                {static_cast<const uint32_t*>(in.ptr), static_cast<size_t>(in.size)}, spec);
            py::array_t<uint8_t> result(in.shape);
            std::memcpy(result.mutable_data(), out.data(), out.size());
            return result;
        },
        py::arg("plane"), py::arg("mode") = "per_frame_minmax", py::arg("cap") = 50.0);

    m.def(
        "speedup",
        [](double baseline_avg, double optimized_avg) {
            RunStats baseline, optimized;
            baseline.avg = baseline_avg;
            optimized.avg = optimized_avg;
            return speedup(baseline, optimized);
        },
        py::arg("baseline_avg"), py::arg("optimized_avg"));

    m.def(
        "cli",
        [](const std::vector<std::string>& args) { return cli_main(args); },
        py::arg("args"), "Run a CLI subcommand; returns the exit code");
}

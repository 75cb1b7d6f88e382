#include "cvl/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cvl/bench.hpp"
#include "cvl/error.hpp"
#include "cvl/ingest.hpp"
#include "cvl/lattice_store.hpp"
#include "cvl/synth.hpp"

namespace fs = std::filesystem;

namespace cvl {

namespace {

// Invalid values the user asked for (distinct from runtime failures): exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    fail(Err::BadConfig, "expected a boolean, got '" + v + "'");
}

uint32_t env_threads() {
    const char* env = std::getenv("CVL_THREADS");
    if (!env || !*env) return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<uint32_t>(v) : 0;
}

} // namespace

std::string PipelineConfig::to_key_values() const {
    std::ostringstream out;
    out << "lat_min = " << fmt_double(grid.lat_min) << "\n";
    out << "lat_max = " << fmt_double(grid.lat_max) << "\n";
    out << "lon_min = " << fmt_double(grid.lon_min) << "\n";
    out << "lon_max = " << fmt_double(grid.lon_max) << "\n";
    out << "lat_step = " << fmt_double(grid.lat_step) << "\n";
    out << "lon_step = " << fmt_double(grid.lon_step) << "\n";
    out << "min_step = " << grid.min_step << "\n";
    out << "dxn_step = " << grid.dxn_step << "\n";
    out << "dxn_offset = " << fmt_double(grid.dxn_offset) << "\n";
    out << "require_in_grid = " << (rules.require_in_grid ? "true" : "false") << "\n";
    out << "speed_ceiling = " << fmt_double(rules.speed_ceiling) << "\n";
    out << "drop_missing = " << (rules.drop_missing ? "true" : "false") << "\n";
    out << "norm_speed_max = " << fmt_double(norm.speed_max) << "\n";
    out << "volume_mode = " << to_string(norm.volume_mode) << "\n";
    out << "volume_cap = " << fmt_double(norm.volume_cap) << "\n";
    out << "partitions = " << n_partitions << "\n";
    out << "threads = " << n_threads << "\n";
    out << "input = " << input_dir << "\n";
    out << "glob = " << input_glob << "\n";
    out << "output = " << output_path << "\n";
    out << "day = " << day << "\n";
    return out.str();
}

void PipelineConfig::apply_key_value(const std::string& key, const std::string& value) {
    auto as_double = [&] {
        try {
            return std::stod(value);
        } catch (const std::exception&) {
            fail(Err::BadConfig, "bad number for " + key + ": '" + value + "'");
        }
    };
    auto as_u32 = [&] {
        try {
            const long v = std::stol(value);
            if (v < 0) fail(Err::BadConfig, key + " must be >= 0");
            return static_cast<uint32_t>(v);
        } catch (const CvlError&) {
            throw;
        } catch (const std::exception&) {
            fail(Err::BadConfig, "bad integer for " + key + ": '" + value + "'");
        }
    };

    if (key == "lat_min") grid.lat_min = as_double();
    else if (key == "lat_max") grid.lat_max = as_double();
    else if (key == "lon_min") grid.lon_min = as_double();
    else if (key == "lon_max") grid.lon_max = as_double();
    else if (key == "lat_step") grid.lat_step = as_double();
    else if (key == "lon_step") grid.lon_step = as_double();
    else if (key == "min_step") grid.min_step = as_u32();
    else if (key == "dxn_step") grid.dxn_step = as_u32();
    else if (key == "dxn_offset") grid.dxn_offset = as_double();
    else if (key == "require_in_grid") rules.require_in_grid = parse_bool(value);
    else if (key == "speed_ceiling") rules.speed_ceiling = as_double();
    else if (key == "drop_missing") rules.drop_missing = parse_bool(value);
    else if (key == "norm_speed_max") norm.speed_max = as_double();
    else if (key == "volume_mode") norm.volume_mode = volume_mode_from_string(value);
    else if (key == "volume_cap") norm.volume_cap = as_double();
    else if (key == "partitions") n_partitions = as_u32();
    else if (key == "threads") n_threads = as_u32();
    else if (key == "input") input_dir = value;
    else if (key == "glob") input_glob = value;
    else if (key == "output") output_path = value;
    else if (key == "day") day = value;
    else fail(Err::BadConfig, "unknown config key '" + key + "'");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::Io, "cannot open config " + path);
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view view = line;
        while (!view.empty() && (view.front() == ' ' || view.front() == '\t'))
            view.remove_prefix(1);
        if (view.empty() || view.front() == '#') continue;
        const size_t eq = view.find('=');
        if (eq == std::string_view::npos)
            fail(Err::BadConfig, path + ":" + std::to_string(line_no) + ": expected key = value");
        auto strip = [](std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
            return std::string(s);
        };
        cfg.apply_key_value(strip(view.substr(0, eq)), strip(view.substr(eq + 1)));
    }
    return cfg;
}

namespace {

struct GridFlag {
    std::string csv; // "lat_min,lat_max,lon_min,lon_max,lat_step,lon_step"

    void apply(GridSpec& grid) const {
        if (csv.empty()) return;
        std::vector<double> vals;
        std::stringstream ss(csv);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                vals.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw UsageError("--grid expects six comma-separated numbers");
            }
        }
        if (vals.size() != 6) throw UsageError("--grid expects six comma-separated numbers");
        grid.lat_min = vals[0];
        grid.lat_max = vals[1];
        grid.lon_min = vals[2];
        grid.lon_max = vals[3];
        grid.lat_step = vals[4];
        grid.lon_step = vals[5];
    }
};

int32_t resolve_day(const PipelineConfig& cfg, const SourceManifest& manifest) {
    if (!cfg.day.empty()) {
        const auto day = Timestamp::parse_day(cfg.day);
        if (!day) throw UsageError("--day expects YYYY-MM-DD, got '" + cfg.day + "'");
        return *day;
    }
    // infer from the first valid record in lexicographic shard order
    for (const auto& path : manifest.shard_paths) {
        const ShardData shard = read_shard(path);
        if (!shard.records.empty()) return shard.records.front().timestamp.day_number();
    }
    return 0;
}

int cmd_process(const PipelineConfig& cfg) {
    if (cfg.input_dir.empty()) throw UsageError("process needs --input");
    if (cfg.output_path.empty()) throw UsageError("process needs --out");
    cfg.grid.validate();

    const SourceManifest manifest = discover_shards(cfg.input_dir, cfg.input_glob);
    if (manifest.shard_paths.empty())
        std::cerr << "warning: empty manifest (no shards matched " << cfg.input_glob << " under "
                  << cfg.input_dir << ")\n";

    const int32_t day = resolve_day(cfg, manifest);
    const uint32_t threads = cfg.n_threads ? cfg.n_threads : default_thread_count();
    const uint32_t partitions = cfg.n_partitions ? cfg.n_partitions : 2 * threads;

    PipelineStats stats;
    const auto frames = run_pipeline(manifest, cfg.grid, cfg.rules, partitions, threads, &stats);

    const auto t0 = std::chrono::steady_clock::now();
    const uint64_t bytes = write_container(frames, cfg.grid, day, cfg.output_path);
    stats.stage_seconds.emplace_back(
        "export", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

    // resolved-config sidecar; feeding it back reproduces this run
    PipelineConfig resolved = cfg;
    resolved.n_threads = threads;
    resolved.n_partitions = partitions;
    resolved.day = day_to_string(day);
    std::ofstream meta(cfg.output_path + ".meta", std::ios::trunc);
    meta << resolved.to_key_values();

    std::cout << "shards: " << manifest.shard_paths.size() << "\n";
    std::cout << "rows read: " << stats.rows_read << "\n";
    for (const auto& [reason, count] : stats.rejected)
        std::cout << "rejected " << reason << ": " << count << "\n";
    std::cout << "duplicates dropped: " << stats.duplicates_dropped << "\n";
    if (stats.conflicting_duplicates)
        std::cerr << "warning: " << stats.conflicting_duplicates
                  << " duplicate keys had conflicting payloads (kept min provenance)\n";
    for (const auto& [reason, count] : stats.filtered)
        if (count) std::cout << "filtered " << reason << ": " << count << "\n";
    std::cout << "accepted: " << stats.accepted << "\n";
    for (const auto& [stage, seconds] : stats.stage_seconds) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.3f", seconds);
        std::cout << "stage " << stage << ": " << buf << " s\n";
    }
    std::cout << "wrote " << cfg.output_path << " (" << bytes << " bytes), day "
              << day_to_string(day) << "\n";
    return 0;
}

int cmd_synth(const SynthConfig& cfg) {
    const SourceManifest manifest = generate_day(cfg);
    std::cout << "wrote " << manifest.shard_paths.size() << " shards, " << manifest.total_rows
              << " rows under " << cfg.out_dir << "\n";
    return 0;
}

struct RenderArgs {
    std::string container;
    std::vector<uint32_t> batches;
    bool composite = false;
    bool all_channels = false;
    std::vector<uint32_t> channels;
    std::string out_dir = ".";
    NormalizationSpec norm;
};

int cmd_render(const RenderArgs& args) {
    const auto [header, frames] = read_container(args.container);
    if (args.batches.empty()) throw UsageError("render needs at least one --batch");

    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    const std::string stem = fs::path(args.container).stem().string();

    std::vector<uint32_t> channels = args.channels;
    if (args.all_channels)
        for (uint32_t ch = 0; ch < 8; ++ch) channels.push_back(ch);

    int written = 0;
    for (uint32_t batch : args.batches) {
        if (batch >= header.n_batches)
            throw UsageError("batch " + std::to_string(batch) + " out of range (valid 0.." +
                             std::to_string(header.n_batches - 1) + ")");
        const BatchFrame& frame = frames[batch];
        char suffix[32];
        for (uint32_t ch : channels) {
            if (ch >= 8)
                throw UsageError("channel " + std::to_string(ch) + " out of range (valid 0..7)");
            std::snprintf(suffix, sizeof(suffix), "_b%03u_c%u.png", batch, ch);
            render_channel(frame, ch, args.norm, (fs::path(args.out_dir) / (stem + suffix)).string());
            ++written;
        }
        if (args.composite) {
            std::snprintf(suffix, sizeof(suffix), "_b%03u_composite.png", batch);
            render_composite(frame, args.norm,
                             (fs::path(args.out_dir) / (stem + suffix)).string());
            ++written;
        }
    }
    std::cout << "wrote " << written << " image(s) under " << args.out_dir << "\n";
    return 0;
}

int cmd_inspect(const std::string& path) {
    const auto [header, frames] = read_container(path);
    std::cout << "magic: CVL1\n";
    std::cout << "version: " << header.version << "\n";
    std::cout << "lat_min: " << fmt_double(header.lat_min) << "\n";
    std::cout << "lat_step: " << fmt_double(header.lat_step) << "\n";
    std::cout << "lon_min: " << fmt_double(header.lon_min) << "\n";
    std::cout << "lon_step: " << fmt_double(header.lon_step) << "\n";
    std::cout << "rows: " << header.rows << "\n";
    std::cout << "cols: " << header.cols << "\n";
    std::cout << "min_step: " << header.min_step << "\n";
    std::cout << "dxn_step: " << header.dxn_step << "\n";
    std::cout << "n_batches: " << header.n_batches << "\n";
    std::cout << "day: " << header.day << " (" << day_to_string(header.day) << ")\n";

    uint64_t nz_total = 0, volume_total = 0;
    float speed_peak = 0.0f;
    for (const auto& frame : frames) {
        uint64_t nz = 0;
        for (uint32_t d = 0; d < 4; ++d)
            for (size_t i = 0; i < frame.volume[d].size(); ++i) {
                if (frame.volume[d][i] == 0) continue;
                ++nz;
                volume_total += frame.volume[d][i];
                speed_peak = std::max(speed_peak, frame.speed[d][i]);
            }
        std::cout << "batch " << frame.t << ": nonzero cells " << nz << "\n";
        nz_total += nz;
    }
    std::cout << "total nonzero cells: " << nz_total << "\n";
    std::cout << "total volume: " << volume_total << "\n";
    std::cout << "peak mean speed: " << fmt_double(static_cast<double>(speed_peak)) << "\n";
    return 0;
}

struct BenchArgs {
    std::string input_dir;
    std::string input_glob = "*.csv";
    uint32_t runs = 25;
    uint32_t warmup = 0;
    uint64_t seed = 0;
    uint32_t journeys = 200;
    std::string format = "md";
    std::string out_path;
    bool no_reread = false;
    PipelineConfig cfg;
};

int cmd_bench(const BenchArgs& args) {
    if (args.runs == 0) throw UsageError("--runs must be >= 1");
    args.cfg.grid.validate();

    SourceManifest manifest;
    fs::path tmp_dir;
    if (!args.input_dir.empty()) {
        manifest = discover_shards(args.input_dir, args.input_glob);
    } else {
        SynthConfig synth;
        synth.seed = args.seed;
        synth.n_journeys = args.journeys;
        synth.lat_min = args.cfg.grid.lat_min;
        synth.lat_max = args.cfg.grid.lat_max;
        synth.lon_min = args.cfg.grid.lon_min;
        synth.lon_max = args.cfg.grid.lon_max;
        tmp_dir = fs::temp_directory_path() /
                  ("cvl_bench_" + std::to_string(static_cast<unsigned long>(::getpid())));
        synth.out_dir = tmp_dir.string();
        manifest = generate_day(synth);
        std::cerr << "note: no --input given; benchmarking a synthetic day (" << manifest.total_rows
                  << " rows, seed " << args.seed << ")\n";
    }

    BenchConfig bench;
    bench.n_runs = args.runs;
    bench.discard_warmup = args.warmup;
    bench.n_threads = args.cfg.n_threads;
    bench.n_partitions = args.cfg.n_partitions;
    bench.reread_inputs = !args.no_reread;

    const SpeedupReport report =
        run_stage_benchmarks(manifest, args.cfg.grid, args.cfg.rules, args.cfg.norm, bench);
    const std::string text = emit_report(
        report, args.format == "csv" ? ReportFormat::Csv : ReportFormat::Markdown);

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path, std::ios::trunc);
        if (!out) fail(Err::Io, "cannot open " + args.out_path);
        out << text;
        std::cout << "wrote report to " << args.out_path << "\n";
    } else {
        std::cout << text;
    }

    if (!tmp_dir.empty()) {
        std::error_code ec;
        fs::remove_all(tmp_dir, ec);
    }
    return 0;
}

void add_grid_flags(CLI::App* cmd, PipelineConfig& cfg, GridFlag& grid_flag) {
    cmd->add_option("--grid", grid_flag.csv,
                    "lat_min,lat_max,lon_min,lon_max,lat_step,lon_step");
    cmd->add_option("--min-step", cfg.grid.min_step, "minutes per temporal bin");
    cmd->add_option("--dxn-step", cfg.grid.dxn_step, "degrees per direction bin");
    cmd->add_option("--dxn-offset", cfg.grid.dxn_offset, "heading rotation in degrees");
}

void add_norm_flags(CLI::App* cmd, NormalizationSpec& norm, std::string& volume_mode) {
    cmd->add_option("--norm-speed-max", norm.speed_max, "speed value mapping to 255");
    cmd->add_option("--volume-mode", volume_mode, "per_frame_minmax | fixed_cap | log1p");
    cmd->add_option("--volume-cap", norm.volume_cap, "cap for fixed_cap mode");
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Connected-vehicle telemetry -> spatio-temporal lattice toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // ---- synth ----
    SynthConfig synth;
    GridFlag synth_grid;
    auto* synth_cmd = app.add_subcommand("synth", "generate a deterministic synthetic CV day");
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--journeys", synth.n_journeys, "number of journeys")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--shards", synth.n_shards, "number of CSV shards");
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    synth_cmd->add_option("--day", synth.day, "calendar day YYYY-MM-DD");
    synth_cmd->add_option("--sample-period", synth.sample_period, "seconds between samples");
    synth_cmd->add_option("--mean-duration", synth.mean_duration, "mean journey seconds");
    synth_cmd->add_option("--speed-max", synth.speed_max, "speed walk ceiling");
    synth_cmd->add_option("--heading-sigma", synth.heading_sigma, "heading drift per step");
    synth_cmd->add_option("--bbox", synth_grid.csv,
                          "lat_min,lat_max,lon_min,lon_max (steps ignored)");
    synth_cmd->callback([&] {
        if (!synth_grid.csv.empty()) {
            // reuse the six-value parser; steps are irrelevant for synth
            std::stringstream ss(synth_grid.csv);
            std::vector<double> vals;
            std::string item;
            while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
            if (vals.size() != 4 && vals.size() != 6)
                throw UsageError("--bbox expects lat_min,lat_max,lon_min,lon_max");
            synth.lat_min = vals[0];
            synth.lat_max = vals[1];
            synth.lon_min = vals[2];
            synth.lon_max = vals[3];
        }
        rc = cmd_synth(synth);
    });

    // ---- process ----
    PipelineConfig proc;
    proc.n_threads = env_threads();
    GridFlag proc_grid;
    std::string proc_config, proc_volume_mode;
    auto* proc_cmd = app.add_subcommand("process", "run the ETL pipeline and write a container");
    proc_cmd->add_option("--config", proc_config, "key=value config file");
    proc_cmd->add_option("--input", proc.input_dir, "shard root directory");
    proc_cmd->add_option("--glob", proc.input_glob, "shard filename glob");
    proc_cmd->add_option("--out", proc.output_path, "container output path");
    proc_cmd->add_option("--day", proc.day, "day YYYY-MM-DD (default: inferred)");
    proc_cmd->add_option("--partitions", proc.n_partitions, "partition count (0 = threads)");
    proc_cmd->add_option("--threads", proc.n_threads, "worker threads (0 = hardware)");
    proc_cmd->add_option("--speed-ceiling", proc.rules.speed_ceiling, "filter ceiling");
    add_grid_flags(proc_cmd, proc, proc_grid);
    add_norm_flags(proc_cmd, proc.norm, proc_volume_mode);
    proc_cmd->callback([&] {
        PipelineConfig cfg = proc;
        if (!proc_config.empty()) {
            cfg = load_config(proc_config);
            // flags the user actually passed override file values
            for (const auto* opt : proc_cmd->get_options()) {
                if (opt->count() == 0) continue;
                const std::string name = opt->get_name();
                if (name == "--input") cfg.input_dir = proc.input_dir;
                else if (name == "--glob") cfg.input_glob = proc.input_glob;
                else if (name == "--out") cfg.output_path = proc.output_path;
                else if (name == "--day") cfg.day = proc.day;
                else if (name == "--partitions") cfg.n_partitions = proc.n_partitions;
                else if (name == "--threads") cfg.n_threads = proc.n_threads;
                else if (name == "--speed-ceiling") cfg.rules.speed_ceiling = proc.rules.speed_ceiling;
                else if (name == "--min-step") cfg.grid.min_step = proc.grid.min_step;
                else if (name == "--dxn-step") cfg.grid.dxn_step = proc.grid.dxn_step;
                else if (name == "--dxn-offset") cfg.grid.dxn_offset = proc.grid.dxn_offset;
                else if (name == "--norm-speed-max") cfg.norm.speed_max = proc.norm.speed_max;
                else if (name == "--volume-cap") cfg.norm.volume_cap = proc.norm.volume_cap;
            }
        }
        proc_grid.apply(cfg.grid);
        if (!proc_volume_mode.empty())
            cfg.norm.volume_mode = volume_mode_from_string(proc_volume_mode);
        rc = cmd_process(cfg);
    });

    // ---- render ----
    RenderArgs render;
    std::string render_volume_mode;
    auto* render_cmd = app.add_subcommand("render", "write PNGs from a container");
    render_cmd->add_option("container", render.container, "container path")->required();
    render_cmd->add_option("--batch", render.batches, "batch index (repeatable)");
    render_cmd->add_flag("--composite", render.composite, "write the RGB composite");
    render_cmd->add_flag("--all-channels", render.all_channels, "write all 8 channels");
    render_cmd->add_option("--channel", render.channels, "channel 0..7 (repeatable)");
    render_cmd->add_option("--out-dir", render.out_dir, "output directory");
    add_norm_flags(render_cmd, render.norm, render_volume_mode);
    render_cmd->callback([&] {
        if (!render_volume_mode.empty())
            render.norm.volume_mode = volume_mode_from_string(render_volume_mode);
        rc = cmd_render(render);
    });

    // ---- bench ----
    BenchArgs bench;
    bench.cfg.n_threads = env_threads();
    GridFlag bench_grid;
    auto* bench_cmd = app.add_subcommand("bench", "time naive-serial vs parallel stages");
    bench_cmd->add_option("--input", bench.input_dir, "shard root (default: synthesize)");
    bench_cmd->add_option("--glob", bench.input_glob, "shard filename glob");
    bench_cmd->add_option("--runs", bench.runs, "runs per measurement");
    bench_cmd->add_option("--warmup", bench.warmup, "discarded warm-up runs");
    bench_cmd->add_option("--seed", bench.seed, "seed for the synthetic day");
    bench_cmd->add_option("--journeys", bench.journeys, "journeys for the synthetic day");
    bench_cmd->add_option("--format", bench.format, "md | csv")
        ->check(CLI::IsMember({"md", "csv"}));
    bench_cmd->add_option("--out", bench.out_path, "write report here instead of stdout");
    bench_cmd->add_flag("--no-reread", bench.no_reread,
                        "reuse parsed inputs across Overall runs");
    bench_cmd->add_option("--partitions", bench.cfg.n_partitions, "partition count");
    bench_cmd->add_option("--threads", bench.cfg.n_threads, "worker threads");
    add_grid_flags(bench_cmd, bench.cfg, bench_grid);
    bench_cmd->callback([&] {
        bench_grid.apply(bench.cfg.grid);
        rc = cmd_bench(bench);
    });

    // ---- inspect ----
    std::string inspect_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "print container header and stats");
    inspect_cmd->add_option("container", inspect_path, "container path")->required();
    inspect_cmd->callback([&] { rc = cmd_inspect(inspect_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const CvlError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("cvlattice");
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace cvl

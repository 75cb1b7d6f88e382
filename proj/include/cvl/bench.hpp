#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cvl/aggregate.hpp"
#include "cvl/normalize.hpp"
#include "cvl/records.hpp"

namespace cvl {

struct RunStats {
    uint32_t n_runs = 0;
    double avg = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std_dev = 0.0;             // population standard deviation
    std::vector<double> samples;      // raw durations, retained for audit

    static RunStats from_samples(std::vector<double> samples);
};

// Wall clock over n_runs invocations. No warm-up discarded unless asked.
// A throwing task aborts the series with TaskFailed naming the run index.
RunStats time_repeated(const std::function<void()>& task, uint32_t n_runs = 25,
                       uint32_t discard_warmup = 0);

double speedup(const RunStats& baseline, const RunStats& optimized); // DivideByZero guard

struct SpeedupRow {
    std::string operation; // Table-2 style name, e.g. "Data Binning"
    std::string metric;    // "Speed" or "Volume"
    RunStats baseline;
    RunStats optimized;
    double speedup = 0.0;
};

struct SpeedupReport {
    std::vector<SpeedupRow> rows;
};

enum class ReportFormat { Markdown, Csv };

// Columns: Operation, Metric, Avg/Min/Max/StdDev per implementation, Speedup.
// Values printed with 6 significant digits.
std::string emit_report(const SpeedupReport& report, ReportFormat format);

// Naive single-threaded reference pipeline: its own dedup, filter, binning
// math, and dense accumulation. Shares no aggregation code with run_pipeline;
// used as ground truth and as the benchmark baseline.
std::vector<BatchFrame> oracle_pipeline(
    const std::vector<std::pair<CvRecord, RecordProvenance>>& raw_records, const GridSpec& spec,
    const FilterRules& rules);

struct BenchConfig {
    uint32_t n_runs = 25;
    uint32_t discard_warmup = 0;
    uint32_t n_threads = 0;     // 0 = hardware concurrency
    uint32_t n_partitions = 0;  // 0 = twice n_threads
    bool reread_inputs = true;  // re-read CSV shards on every Overall run
};

// Times each ETL stage serial vs parallel, plus an end-to-end Overall row
// (serial parse + oracle vs run_pipeline).
SpeedupReport run_stage_benchmarks(const SourceManifest& manifest, const GridSpec& spec,
                                   const FilterRules& rules, const NormalizationSpec& norm,
                                   const BenchConfig& config);

} // namespace cvl

#pragma once

#include <string>
#include <vector>

#include "cvl/aggregate.hpp"
#include "cvl/grid.hpp"
#include "cvl/normalize.hpp"

namespace cvl {

// Everything a processing run needs, serializable as key=value text. Flags
// override file values; the fully-resolved config is echoed into each output's
// sidecar so a run can be reproduced from its artifact.
struct PipelineConfig {
    GridSpec grid;
    FilterRules rules;
    NormalizationSpec norm;
    uint32_t n_partitions = 0; // 0 = twice the thread count
    uint32_t n_threads = 0;    // 0 = hardware / CVL_THREADS
    std::string input_dir;
    std::string input_glob = "*.csv";
    std::string output_path;
    std::string day; // "YYYY-MM-DD"; empty = infer from first record

    std::string to_key_values() const;
    void apply_key_value(const std::string& key, const std::string& value); // throws BadConfig
};

PipelineConfig load_config(const std::string& path); // throws BadConfig / Io

// Exit codes: 0 ok, 1 runtime failure, 2 usage error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args); // args without argv[0]

} // namespace cvl

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensireach/models.hpp"
#include "sensireach/ode.hpp"
#include "sensireach/pipeline.hpp"

namespace sensireach::cli {

// Options shared by every verb.  --out and --seed override the config file.
struct CliOptions {
    std::string config_path;
    std::string out_dir;
    bool out_dir_set = false;
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0 resolves via SENSIREACH_THREADS, then hardware
};

// Parsed and validated configuration file.
struct RunConfig {
    std::string model_name;
    ParamMap params;
    double t0 = 0.0;
    double tf = 0.0;
    IntervalMatrix x0;
    std::string method;             // algorithm1 | ia_only | sampling_falsification | all
    int per_dim = 2;
    std::vector<int> grid_levels;   // compare: one algorithm1 run per level
    int taylor_order = 0;           // 0 = automatic
    IntegratorConfig integrator;
    int sf_max_iters = 2;
    int mc_count = 0;
    std::uint64_t mc_seed = 0;
    std::string output_dir = ".";
    std::string result_file;        // mc: check a previously written result
    std::string config_dir;         // directory of the config, for relative paths
};

// Throws std::invalid_argument naming the offending key on any schema
// problem; file-level JSON errors surface as nlohmann parse exceptions.
RunConfig load_config(const std::string& path);

int cmd_run(const CliOptions& options);
int cmd_compare(const CliOptions& options);
int cmd_mc(const CliOptions& options);

// Runs the verb and maps errors to exit codes: 0 success, 2 configuration or
// schema errors, 3 numerical failures (blow-up, inadmissible truncation
// order, inverted bounds).
int dispatch(const std::string& verb, const CliOptions& options);

}  // namespace sensireach::cli

#pragma once

#include "glt/kernels.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace glt {

/// Parsed and validated experiment description. Unknown config keys and
/// missing kernel parameters are rejected up front, naming the field.
struct ExperimentConfig {
    std::string experiment;
    Kernel kernel = Kernel::brownian();
    std::vector<double> grid;
    int n_paths = 1000;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = GLT_THREADS env (default 1)
    double bin_width = 0.0;  // 0 = default 0.04 sqrt(R_T)
    std::vector<double> levels{0.0};
    double T = 0.0;  // 0 = grid end
    double delta = 0.0;
    int refine = 8;
    int chaos_K = 30;
    std::vector<int> grid_exponents{8, 9, 10, 11, 12};
    std::string weighting = "lebesgue";
    bool has_expected_curve = false;
    double curve_from = -2.0, curve_to = 2.0;
    int curve_points = 101;
    nlohmann::json tolerances;  // resolved (defaults merged)
    std::string out_dir = "out";

    nlohmann::json echo;  // original config as parsed
};

/// Experiment names accepted by parse_config / the CLI.
const std::vector<std::string>& experiment_names();

Kernel parse_kernel(const nlohmann::json& j, const std::string& where = "kernel");

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct RunResult {
    bool pass = false;
    nlohmann::json report;
    std::vector<std::string> files;  // paths written, report.json included
};

/// Runs the experiment, writes CSV tables and report.json into out_dir,
/// returns pass = all declared tolerances met.
RunResult run(const ExperimentConfig& cfg);

/// Two-column curve export (level,value) with a header row.
void write_curve_csv(const std::vector<double>& levels, const std::vector<double>& values,
                     const std::string& path);

/// Numeric CSV reader (skips one header row if non-numeric).
std::vector<std::vector<double>> read_csv(const std::string& path);

std::string config_hash(const nlohmann::json& j);

} // namespace glt

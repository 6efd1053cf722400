#pragma once

#include <string>
#include <vector>

#include "mfvi/diagnostics.hpp"

namespace mfvi {

struct RunConfig {
    explicit RunConfig(Model m) : model(std::move(m)) {}

    Model model;
    std::vector<Grid1D> grids;  // one per coordinate
    std::vector<double> init_means;
    std::vector<double> init_stds;
    double cavi_tol = 1e-7;
    int cavi_max_sweeps = 500;
    JkoConfig jko;
    double jko_horizon = 20.0;
    FpConfig fp;
    double fp_horizon = 20.0;
    SdeConfig sde;
    double sde_horizon = 10.0;
    double sde_burn_in = 5.0;
    std::vector<double> study_h_list = {0.2, 0.1, 0.05, 0.025};
    std::vector<double> study_times = {1.0};
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool emit_traces = true;
    bool emit_snapshots = false;
    bool emit_report = true;
    std::string resolved_text;  // fully-resolved config echo (JSON)

    ProductMeasure initial_measure() const;
    CompareConfig compare_config() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Subcommands: run-cavi | run-jko | run-fp | run-sde | compare | study-h | dissipation.
// Returns the process exit status (0 success, 1 solver failure, 3 verdict failure).
int dispatch(const RunConfig& cfg, const std::string& subcommand, bool quiet);

}  // namespace mfvi

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluxlim/params.hpp"
#include "fluxlim/solver.hpp"
#include "fluxlim/transforms.hpp"

namespace fluxlim {

// Flat key=value experiment configuration ('#' comments, keys match field names).
struct ExperimentConfig {
    ModelParams model;
    double gamma = -1.0; // <= 0: use default_gamma(model)
    int grid_n = 1024;
    double clustering_exponent = 3.0;
    SolverConfig solver;
    double horizon = -1.0; // <= 0: 1.2 * T_max
    InitialMode initial_mode = InitialMode::mollified;
    double initial_scale = 1.0; // multiplies U0 after construction; 1 keeps admissibility
    double initial_inflation = 1.1;
    int snapshot_every = 50;
    std::string output_dir = "out";
    std::uint64_t seed = 12345;
    int workers = 0; // sweep worker pool; 0 = hardware concurrency

    int cert_rho_samples = 10000;
    int cert_t_samples = 5;
    double cert_tol = 1e-9;

    int hardy_cases = 1000;
    std::vector<double> hardy_deltas = {0.25, 0.5, 1.5, 2.0};
    int hardy_grid_n = 256;
    int mvt_cases = 1000;
};

ExperimentConfig parse_config_text(const std::string& text); // config_error on bad input
ExperimentConfig parse_config_file(const std::string& path); // config_error if unreadable

} // namespace fluxlim

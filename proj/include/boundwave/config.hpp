#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace boundwave::config {

enum class Experiment { Mirror, Simulate, Scatter, Resonances, Wkb };

Experiment parse_experiment(const std::string& s);
std::string to_string(Experiment e);

/// Flat run configuration. Zero-valued "auto" fields are resolved by
/// validate() and the resolved value is recorded as a default.
struct RunConfig {
    Experiment experiment = Experiment::Simulate;
    std::string name;  // output subdirectory; empty: experiment name

    // physics
    std::string basis = "harmonic";
    double omega = 10.0;
    double a = 1.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double P = 10.0;
    double sigma = 0.5;
    double x0 = -10.0;
    int n0 = 0;
    int n_ch = 8;

    // evolution
    double L = 80.0;
    int n_grid = 4096;
    double dt = 0.0;       // auto: 0.25 dx^2 / pi
    double t_final = 0.0;  // auto: 0.9 of the no-wrap bound
    int records = 200;
    std::vector<double> snapshot_times;
    int density_points = 256;
    bool absorbing_mask = false;
    bool predict = true;   // fold the stationary S-matrix for comparison
    int prediction_nodes = 20;

    // scatter
    double energy = 0.0;      // 0: E_cm of the packet plus eps_n0
    bool sweep = false;
    double sweep_e_min = 0.0; // 0: just above eps_0
    double sweep_e_max = 0.0; // 0: eps_0 + (P + 6/sigma)^2
    int sweep_points = 200;

    // resonances
    double L_r = 0.0;  // auto: 36 / sqrt(Omega)
    int N_r = 300;
    std::vector<double> theta;  // auto: paper angle plus 0.05
    double stability_tol = 1e-3;
    double angle_tol = 0.05;
    double e_max = 0.0;
    std::string sector = "auto";  // auto | all | even | odd
    int capacity = 4096;

    // wkb
    double wkb_x_max = 0.0;  // auto: 4 / sqrt(Omega)
    int wkb_points = 801;

    // mirror
    double k = 1.0;
    double vm = 1.0;

    std::vector<std::string> defaulted;  // keys whose value came from a default
};

using Override = std::pair<std::string, std::string>;

/// Reads a flat YAML mapping, applies `key=value` overrides, validates.
RunConfig load_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

/// Same from YAML text (empty text: all defaults).
RunConfig parse_config(const std::string& text, const std::vector<Override>& overrides = {});

/// Checks preconditions and resolves auto values; throws ConfigError naming
/// the field and the violated constraint.
void validate(RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace boundwave::config

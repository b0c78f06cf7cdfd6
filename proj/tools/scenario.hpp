#pragma once

#include "sica/sica.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sica::cli {

// Config problem addressed by a dotted key path (or a line for syntax errors).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulateOptions {
    std::size_t n_paths = 1000;
    double omega_tol_fraction = 0.01;
    double max_violation_fraction = 0.01;
    std::size_t dump_paths = 16;
};

struct VerifyOptions {
    std::size_t random_checks = 10000;
    std::size_t n_paths = 200;
    double omega_tol_fraction = 0.01;
    double max_violation_fraction = 0.01;
};

struct GradcheckOptions {
    std::size_t n_cells = 50;
    double fd_step = 1e-5;
    double rel_tol = 1e-3;
    double abs_floor = 1e-8;
};

struct LipschitzOptions {
    double theta = 1.0;
    double k = 0.5;
    std::vector<double> scales{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2};
    std::size_t n_paths = 200;
};

struct ScenarioConfig {
    ImpreciseParameterSet imprecise;
    double k = 0.5;
    std::vector<double> k_grid;
    StatePoint x0;
    TimeGrid grid;
    double u_lo = 0.0;
    double u_hi = 1.0;
    std::optional<double> u_initial;
    CostWeights weights;
    SweepConfig sweep;
    SimulateOptions simulate;
    VerifyOptions verify;
    GradcheckOptions gradcheck;
    LipschitzOptions lipschitz;
    std::filesystem::path output_dir = "out";
    std::size_t threads = 1;

    ControlGrid initial_control() const;
    ControlGrid initial_control(const TimeGrid& g) const;
};

// Applies `dotted.key=value` overrides; the value is parsed as JSON when possible,
// otherwise taken as a string. Throws ConfigError on a malformed override.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Throws ConfigError naming the offending key.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

// Reads the file, applies overrides in order, parses. Throws ConfigError.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

std::vector<double> default_k_grid();

} // namespace sica::cli

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncbogo/grid.hpp"

namespace ncbogo {

enum class Scenario { stationary, spectrum, dynamics, number_shift, homogeneous_check, fock_oracle };

const char* to_string(Scenario s);
/// Throws ConfigurationError listing the allowed names.
Scenario scenario_from_string(const std::string& s);

/// Resolved run configuration. Every field holds its effective value after
/// defaults have been applied.
struct ScenarioConfig {
    Scenario scenario = Scenario::stationary;

    struct GridSection {
        int n_points = 0;
        double length = 0.0;
        Boundary boundary = Boundary::periodic;
        double origin = 0.0;
    } grid;

    struct PhysicsSection {
        /// Scaled coupling N u; always resolved.
        double u_tilde = 0.0;
        /// Physical coupling; resolved as u_tilde / N when only u_tilde is given.
        double u = 0.0;
        double n_particles = 1000.0;
        /// none | harmonic | quench
        std::string potential = "none";
        double omega = 1.0;
        double omega_to = 1.0;
        double t_switch = 0.0;
    } physics;

    struct NumericsSection {
        double tol = 1e-10;
        double dt = 1e-3;
        double t_final = 10.0;
        int K = 0;
        double delta_N = 0.5;
        /// -1: no cap (all N-particle states).
        int n_max_excited = -1;
        std::vector<int> fock_n_values{10, 20, 40};
        int order = 2;
        /// Evolve without the u|xi|^2 term (falsification runs of `dynamics`).
        bool evolve_linear = false;
        double k_mode = 0.0;
    } numerics;

    struct OutputSection {
        std::string directory = "ncbogo-out";
        int stride = 100;
        bool json = true;
        bool csv = true;
    } output;
};

/// Parses the INI dialect documented in the README. Unknown sections or keys,
/// missing required keys and out-of-range values raise ConfigurationError
/// naming the offending key.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical INI rendering of a resolved config; parse_config of the result
/// reproduces the same config.
std::string normalized_config(const ScenarioConfig& config);

struct RunOutcome {
    /// 0 on success, 4 when an unstable spectrum was detected (outputs written).
    int exit_code = 0;
    std::string output_dir;
    std::string summary_json;
    std::vector<std::string> files;
};

/// Executes the scenario and writes summary.json and the CSV tables.
/// `output_dir` overrides the configured directory when non-empty.
RunOutcome run_scenario(const ScenarioConfig& config, const std::string& output_dir = "");

} // namespace ncbogo

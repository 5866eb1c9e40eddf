// config.hpp — declarative experiment configs for the scatterwork CLI.
//
// Configs are JSON documents; load_config parses, validates (reporting every
// failure, not just the first), and resolves derived quantities like p0 from
// v0 or sigma_p from the normalized momentum spread.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace swcli {

using json = nlohmann::ordered_json;

// Thrown on parse or validation failure; message lists all problems.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SystemConfig {
    std::vector<double> energies;
    std::vector<double> coupling;  // interleaved complex, row-major
    double hbar = 1.0;
    int dim() const { return static_cast<int>(energies.size()); }
    double max_gap() const;
};

struct StateConfig {
    enum class Kind { thermal, coherent_thermal, matrix };
    Kind kind = Kind::thermal;
    double beta = 1.0;
    std::vector<double> matrix;  // interleaved, for Kind::matrix
};

struct PacketConfig {
    // exactly one of p0 / v0 and one of sigma_p / sigma_bar_p
    std::optional<double> p0;
    std::optional<double> v0;
    std::optional<double> sigma_p;
    std::optional<double> sigma_bar_p;
    std::optional<double> x0;  // default: one Bohr revival upstream
    double mass = 1.0;

    double resolved_p0() const { return p0 ? *p0 : *v0 * mass; }
    double resolved_v0() const { return resolved_p0() / mass; }
    double resolved_sigma_p(double max_gap) const;
    double resolved_x0(double max_gap, double hbar) const;
};

struct PotentialSegment {
    double width = 0.0;
    double value = 0.0;
};

struct PotentialConfig {
    std::vector<PotentialSegment> segments;
    double total_width() const;
};

struct GridConfig {
    std::optional<double> lo;
    std::optional<double> hi;
    int points = 4001;
    double span_sigmas = 8.0;
};

struct SweepConfig {
    std::string parameter;        // sigma_bar_p | sigma_p | mass | v0
    std::vector<double> values;   // explicit, or generated from from/to/points
};

struct RunConfig {
    int threads = 0;
    double tol = 1e-10;
    std::optional<SweepConfig> sweep;
    std::vector<double> fig1_sigma_bars = {0.05, 5.0};
};

// Auxiliary clock system for the resource subcommand; unset fields mirror the
// collision packet under E_A = gamma p.
struct ClockConfig {
    double gamma = 1.0;
    std::optional<double> p0;
    std::optional<double> sigma_p;
    std::optional<double> x0;
    std::optional<int> points;
    double span_sigmas = 8.0;
};

struct ExperimentConfig {
    SystemConfig system;
    StateConfig state;
    PacketConfig packet;
    PotentialConfig potential;
    GridConfig grid;
    RunConfig run;
    ClockConfig clock;

    json echo() const;  // canonical resolved form for output headers
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const json& doc);

// The built-in preset reproducing the qubit-barrier experiment
// (Delta_S = beta = V0 = J = a = v0 = 1, m = 1000).
ExperimentConfig fig1_config();

// Staircase a smooth profile lambda(x) on (0, width) into n equal segments,
// sampling at midpoints; needed because the solver is exact only for
// piecewise-constant potentials.
std::vector<PotentialSegment> staircase(const std::function<double(double)>& profile,
                                        double width, int n_steps);

} // namespace swcli

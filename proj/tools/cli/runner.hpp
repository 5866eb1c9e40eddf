// runner.hpp — subcommand implementations; everything numeric goes through the
// scatterwork C API.

#pragma once

#include <string>

#include "config.hpp"

namespace swcli {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;     // config parse/validation failure
inline constexpr int kExitInvariant = 3;  // numerical invariant violated
inline constexpr int kExitRuntime = 4;    // other runtime failure

struct RunOptions {
    std::string out_dir = ".";
    int threads = -1;   // < 0: take from the config
    double tol = -1.0;  // < 0: take from the config
};

int run_smatrix(const ExperimentConfig& cfg, const RunOptions& opt);
int run_tpm(const ExperimentConfig& cfg, const RunOptions& opt);
int run_collide(const ExperimentConfig& cfg, const RunOptions& opt);
int run_sweep(const ExperimentConfig& cfg, const RunOptions& opt);
int run_resource(const ExperimentConfig& cfg, const RunOptions& opt);
int run_fig1(const ExperimentConfig& cfg, const RunOptions& opt);

} // namespace swcli

// scatterwork — experiment runner for collision-probed energy statistics.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"scatterwork: coupled-channel collisions vs drive-side energy statistics"};
    app.require_subcommand(1);

    std::string config_path;
    swcli::RunOptions opt;

    const auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* c = cmd->add_option("--config", config_path, "experiment config (JSON)");
        if (config_required) c->required();
        cmd->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        cmd->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
        cmd->add_option("--tol", opt.tol, "propagator/quadrature tolerance");
    };

    auto* smatrix = app.add_subcommand("smatrix", "dump S-matrix grids and unitarity defects");
    auto* tpm = app.add_subcommand("tpm", "dump the TPM delta comb and work averages");
    auto* collide = app.add_subcommand(
        "collide", "exact / narrow-limit / convolution distribution comparison");
    auto* sweep = app.add_subcommand("sweep", "vary one scalar and tabulate energy changes");
    auto* res = app.add_subcommand(
        "resource", "clock-system energy distribution after the equivalent unitary");
    auto* fig1 = app.add_subcommand(
        "fig1", "qubit-barrier reference experiment (built-in preset unless --config)");
    add_common(smatrix, true);
    add_common(tpm, true);
    add_common(collide, true);
    add_common(sweep, true);
    add_common(res, true);
    add_common(fig1, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : swcli::kExitConfig;
    }

    swcli::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? swcli::fig1_config() : swcli::load_config(config_path);
    } catch (const swcli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return swcli::kExitConfig;
    }

    if (smatrix->parsed()) return swcli::run_smatrix(cfg, opt);
    if (tpm->parsed()) return swcli::run_tpm(cfg, opt);
    if (collide->parsed()) return swcli::run_collide(cfg, opt);
    if (sweep->parsed()) return swcli::run_sweep(cfg, opt);
    if (res->parsed()) return swcli::run_resource(cfg, opt);
    if (fig1->parsed()) return swcli::run_fig1(cfg, opt);
    return swcli::kExitRuntime;
}

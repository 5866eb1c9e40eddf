#include "runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <vector>

#include <scatterwork/scatterwork.h>

#include "csv.hpp"

namespace swcli {

namespace {

struct CApiError : std::runtime_error {
    CApiError(sw_status status, const std::string& msg)
        : std::runtime_error(msg), status(status) {}
    sw_status status;
};

void check(sw_status status) {
    if (status != SW_OK) throw CApiError(status, sw_last_error());
}

int exit_code_for(const CApiError& e) {
    switch (e.status) {
        case SW_ERR_INVALID_ARGUMENT:
        case SW_ERR_VALIDATION:
        case SW_ERR_DOMAIN:
            return kExitConfig;
        case SW_ERR_THRESHOLD_PROXIMITY:
        case SW_ERR_NUMERICAL:
        case SW_ERR_GRID:
            return kExitInvariant;
        default:
            return kExitRuntime;
    }
}

template <typename F>
int guarded(F&& body) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CApiError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

template <typename T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, std::integral_constant<decltype(Free), Free>>;

// Resolved handles for one experiment.
struct Session {
    Handle<sw_system, sw_system_free> sys;
    Handle<sw_potential, sw_potential_free> pot;
    Handle<sw_packet, sw_packet_free> pk;
    Handle<sw_density, sw_density_free> rho;
    double p0 = 0.0, sigma_p = 0.0, x0 = 0.0, mass = 0.0, hbar = 1.0;
    double ep0 = 0.0;       // mean kinetic energy
    double tau = 0.0;       // a / v0
    int dim = 0;
    int threads = 0;
    double tol = 1e-10;

    static Session open(const ExperimentConfig& cfg, const RunOptions& opt,
                        double sigma_bar_override = -1.0, double mass_override = -1.0,
                        bool force_coherent = false) {
        Session s;
        s.dim = cfg.system.dim();
        s.hbar = cfg.system.hbar;
        s.threads = opt.threads >= 0 ? opt.threads : cfg.run.threads;
        s.tol = opt.tol > 0.0 ? opt.tol : cfg.run.tol;

        sw_system* sys = nullptr;
        check(sw_system_create(s.dim, cfg.system.energies.data(), cfg.system.coupling.data(),
                               s.hbar, &sys));
        s.sys.reset(sys);

        std::vector<double> widths, values;
        for (const auto& seg : cfg.potential.segments) {
            widths.push_back(seg.width);
            values.push_back(seg.value);
        }
        sw_potential* pot = nullptr;
        check(sw_potential_create(static_cast<int>(widths.size()), widths.data(), values.data(),
                                  &pot));
        s.pot.reset(pot);

        const double max_gap = cfg.system.max_gap();
        PacketConfig pkc = cfg.packet;
        if (mass_override > 0.0) {
            if (!pkc.v0) throw ConfigError("mass sweeps need the packet given as v0 + mass");
            pkc.mass = mass_override;
        }
        if (sigma_bar_override > 0.0) {
            pkc.sigma_p.reset();
            pkc.sigma_bar_p = sigma_bar_override;
        }
        s.mass = pkc.mass;
        s.p0 = pkc.resolved_p0();
        s.sigma_p = pkc.resolved_sigma_p(max_gap);
        s.x0 = pkc.resolved_x0(max_gap, s.hbar);
        sw_packet* pk = nullptr;
        check(sw_packet_create(s.p0, s.sigma_p, s.x0, s.mass, s.hbar, &pk));
        s.pk.reset(pk);
        check(sw_packet_info(pk, nullptr, nullptr, &s.ep0, nullptr));
        s.tau = cfg.potential.total_width() / (s.p0 / s.mass);

        sw_density* rho = nullptr;
        auto kind = cfg.state.kind;
        if (force_coherent) kind = StateConfig::Kind::coherent_thermal;
        switch (kind) {
            case StateConfig::Kind::thermal:
                check(sw_density_thermal(sys, cfg.state.beta, &rho));
                break;
            case StateConfig::Kind::coherent_thermal:
                check(sw_density_coherent_thermal(sys, cfg.state.beta, &rho));
                break;
            case StateConfig::Kind::matrix:
                check(sw_density_create(s.dim, cfg.state.matrix.data(), &rho));
                break;
        }
        s.rho.reset(rho);
        return s;
    }

    Handle<sw_grid, sw_grid_free> make_grid(const ExperimentConfig& cfg) const {
        sw_grid* grid = nullptr;
        if (cfg.grid.lo && cfg.grid.hi) {
            check(sw_grid_create(*cfg.grid.lo, *cfg.grid.hi, cfg.grid.points, sys.get(), &grid));
        } else {
            check(sw_grid_for_packet(pk.get(), sys.get(), cfg.grid.points, cfg.grid.span_sigmas,
                                     &grid));
        }
        return Handle<sw_grid, sw_grid_free>(grid);
    }

    // unitary induced by traversing the potential at the mean kinetic energy
    std::vector<double> drive_unitary() const {
        std::vector<double> u(static_cast<std::size_t>(2 * dim * dim));
        check(sw_semiclassical_unitary(sys.get(), pot.get(), ep0, mass, tol, u.data()));
        return u;
    }
};

nlohmann::ordered_json regime_json(const Session& s) {
    sw_regime_report rep;
    check(sw_classify_regime(s.pk.get(), s.sys.get(), s.pot.get(), &rep));
    const auto label = [&]() -> std::string {
        switch (rep.overall) {
            case SW_REGIME_NARROW: return "narrow";
            case SW_REGIME_BROAD: return "broad";
            case SW_REGIME_INTERMEDIATE: return "intermediate";
            case SW_REGIME_NON_SEMICLASSICAL: return "non_semiclassical";
        }
        return "unknown";
    }();
    return {{"overall", label},
            {"right_moving", rep.right_moving},
            {"narrow_energy", rep.narrow_energy},
            {"semiclassical_potential", rep.semiclassical_potential},
            {"semiclassical_action", rep.semiclassical_action},
            {"semiclassical_gap", rep.semiclassical_gap},
            {"broad_energy", rep.broad_energy},
            {"broad_time", rep.broad_time}};
}

std::string regime_label(const Session& s) {
    return regime_json(s)["overall"].get<std::string>();
}

struct TpmSummary {
    std::vector<double> w, weight;
    double average = 0.0;
    double untouched = 0.0;
};

TpmSummary tpm_summary(const Session& s, const std::vector<double>& u) {
    TpmSummary out;
    int natoms = 0;
    check(sw_tpm_comb(s.sys.get(), u.data(), s.rho.get(), &natoms, nullptr, nullptr));
    out.w.resize(static_cast<std::size_t>(natoms));
    out.weight.resize(static_cast<std::size_t>(natoms));
    check(sw_tpm_comb(s.sys.get(), u.data(), s.rho.get(), &natoms, out.w.data(),
                      out.weight.data()));
    check(sw_tpm_average(s.sys.get(), u.data(), s.rho.get(), &out.average));
    check(sw_untouched_work(s.sys.get(), u.data(), s.rho.get(), &out.untouched));
    return out;
}

std::filesystem::path out_path(const RunOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return std::filesystem::path(opt.out_dir) / name;
}

} // namespace

int run_smatrix(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        const Session s = Session::open(cfg, opt);
        const auto grid = s.make_grid(cfg);
        const int n_ep = sw_grid_size(grid.get());
        std::vector<double> ep(static_cast<std::size_t>(n_ep));
        check(sw_grid_points(grid.get(), ep.data()));
        const double e_min = cfg.system.energies.front();
        const double e_max = cfg.system.energies.back();
        const double lo = ep.front() + e_min, hi = ep.back() + e_max;

        auto params = cfg.echo();
        params["total_energy_range"] = {lo, hi};
        CsvWriter csv(out_path(opt, "smatrix.csv").string(), "smatrix", params,
                      {"E", "j", "jp", "alpha", "beta", "re_s", "im_s", "unitarity_defect"});

        const int n = s.dim;
        std::vector<double> blocks(static_cast<std::size_t>(2 * 4 * n * n));
        std::vector<int> open(static_cast<std::size_t>(n));
        double worst_defect = 0.0;
        const char* dir_names[2] = {"+", "-"};
        for (int i = 0; i < n_ep; ++i) {
            const double e_total = lo + (hi - lo) * i / std::max(1, n_ep - 1);
            double defect = 0.0;
            check(sw_smatrix(s.sys.get(), s.pot.get(), s.mass, e_total, blocks.data(),
                             open.data(), &defect));
            worst_defect = std::max(worst_defect, defect);
            for (int j = 0; j < n; ++j)
                for (int jp = 0; jp < n; ++jp)
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) {
                            const int row = a * n + jp, col = b * n + j;
                            const std::size_t base =
                                2 * static_cast<std::size_t>(row * 2 * n + col);
                            csv.row({format_double(e_total), std::to_string(j),
                                     std::to_string(jp), dir_names[a], dir_names[b],
                                     format_double(blocks[base]), format_double(blocks[base + 1]),
                                     format_double(defect)});
                        }
        }
        csv.close();
        auto meta = cfg.echo();
        meta["worst_unitarity_defect"] = worst_defect;
        meta["total_energy_points"] = n_ep;
        write_json_file(out_path(opt, "smatrix_meta.json").string(), meta);
        if (worst_defect > 1e-8)
            throw CApiError(SW_ERR_NUMERICAL, "unitarity defect " +
                                                  format_double(worst_defect) + " exceeds 1e-8");
    });
}

int run_tpm(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        const Session s = Session::open(cfg, opt);
        const auto u = s.drive_unitary();
        const auto tpm = tpm_summary(s, u);

        auto params = cfg.echo();
        params["tau"] = s.tau;
        CsvWriter csv(out_path(opt, "tpm_comb.csv").string(), "tpm", params, {"W", "weight"});
        for (std::size_t i = 0; i < tpm.w.size(); ++i) csv.row({tpm.w[i], tpm.weight[i]});
        csv.close();

        // cross-check the first moment against the basis-independent trace form
        sw_density* post = nullptr;
        check(sw_post_tpm_state(s.sys.get(), u.data(), s.rho.get(), &post));
        std::vector<double> rho_mat(static_cast<std::size_t>(2 * s.dim * s.dim));
        std::vector<double> post_mat(rho_mat.size());
        check(sw_density_get(s.rho.get(), rho_mat.data()));
        check(sw_density_get(post, post_mat.data()));
        sw_density_free(post);
        double trace_form = 0.0;
        for (int j = 0; j < s.dim; ++j) {
            const std::size_t d = 2 * static_cast<std::size_t>(j * s.dim + j);
            trace_form += cfg.system.energies[static_cast<std::size_t>(j)] *
                          (rho_mat[d] - post_mat[d]);
        }

        auto meta = cfg.echo();
        meta["tau"] = s.tau;
        meta["tpm_average"] = tpm.average;
        meta["tpm_average_trace_form"] = trace_form;
        meta["untouched_work"] = tpm.untouched;
        write_json_file(out_path(opt, "tpm_meta.json").string(), meta);
        if (std::abs(tpm.average - trace_form) > 1e-10)
            throw CApiError(SW_ERR_NUMERICAL, "TPM first moment and trace form disagree");
    });
}

int run_collide(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        const Session s = Session::open(cfg, opt);
        const auto grid = s.make_grid(cfg);
        const int n = sw_grid_size(grid.get());
        std::vector<double> ep(static_cast<std::size_t>(n));
        check(sw_grid_points(grid.get(), ep.data()));

        std::vector<double> initial(ep.size()), final_d(ep.size()), narrow(ep.size()),
            conv(ep.size());
        double drift_initial = 0.0, drift_final = 0.0, drift_narrow = 0.0, drift_conv = 0.0;
        check(sw_initial_distribution(s.pk.get(), grid.get(), initial.data(), &drift_initial));
        check(sw_final_distribution(s.sys.get(), s.rho.get(), s.pk.get(), s.pot.get(), grid.get(),
                                    s.threads, final_d.data(), &drift_final));
        check(sw_narrow_limit_distribution(s.sys.get(), s.rho.get(), s.pk.get(), s.pot.get(),
                                           grid.get(), s.threads, 1, narrow.data(),
                                           &drift_narrow));
        const auto u = s.drive_unitary();
        const auto tpm = tpm_summary(s, u);
        check(sw_convolve_comb(s.pk.get(), static_cast<int>(tpm.w.size()), tpm.w.data(),
                               tpm.weight.data(), grid.get(), conv.data(), &drift_conv));

        double tv_conv = 0.0, tv_narrow = 0.0;
        check(sw_total_variation(grid.get(), final_d.data(), conv.data(), &tv_conv));
        check(sw_total_variation(grid.get(), final_d.data(), narrow.data(), &tv_narrow));
        double dex = 0.0;
        check(sw_kinetic_energy_change(s.sys.get(), s.rho.get(), s.pk.get(), s.pot.get(), &dex));

        auto params = cfg.echo();
        params["regime"] = regime_label(s);
        CsvWriter csv(out_path(opt, "collide.csv").string(), "collide", params,
                      {"E_p", "density_initial", "density_final", "density_narrow_limit",
                       "density_convolution_prediction"});
        for (std::size_t i = 0; i < ep.size(); ++i)
            csv.row({ep[i], initial[i], final_d[i], narrow[i], conv[i]});
        csv.close();

        auto meta = cfg.echo();
        meta["regime_report"] = regime_json(s);
        meta["tau"] = s.tau;
        meta["tv_exact_vs_convolution"] = tv_conv;
        meta["tv_exact_vs_narrow_limit"] = tv_narrow;
        meta["kinetic_energy_change"] = dex;
        meta["tpm_average"] = tpm.average;
        meta["untouched_work"] = tpm.untouched;
        meta["normalization_drift"] = {{"initial", drift_initial},
                                       {"final", drift_final},
                                       {"narrow_limit", drift_narrow},
                                       {"convolution", drift_conv}};
        write_json_file(out_path(opt, "collide_meta.json").string(), meta);
    });
}

int run_sweep(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        if (!cfg.run.sweep) throw ConfigError("run.sweep block is required for the sweep command");
        const auto& sweep = *cfg.run.sweep;

        auto params = cfg.echo();
        params["sweep_parameter"] = sweep.parameter;
        CsvWriter csv(out_path(opt, "sweep.csv").string(), "sweep", params,
                      {"value", "kinetic_energy_change", "tpm_average", "untouched_work",
                       "semiclassical_amplitude_defect", "reflection_probability", "regime"});

        for (double value : sweep.values) {
            double sigma_bar_override = -1.0, mass_override = -1.0;
            ExperimentConfig point = cfg;
            if (sweep.parameter == "sigma_bar_p") {
                sigma_bar_override = value;
            } else if (sweep.parameter == "sigma_p") {
                point.packet.sigma_bar_p.reset();
                point.packet.sigma_p = value;
            } else if (sweep.parameter == "mass") {
                mass_override = value;
            } else if (sweep.parameter == "v0") {
                point.packet.p0.reset();
                point.packet.v0 = value;
            }
            const Session s = Session::open(point, opt, sigma_bar_override, mass_override);
            const auto u = s.drive_unitary();
            const auto tpm = tpm_summary(s, u);
            double dex = 0.0, amp = 0.0, refl = 0.0;
            check(sw_kinetic_energy_change(s.sys.get(), s.rho.get(), s.pk.get(), s.pot.get(),
                                           &dex));
            check(sw_semiclassical_defect(s.sys.get(), s.pot.get(), s.mass, s.ep0, &amp, &refl));
            csv.row({format_double(value), format_double(dex), format_double(tpm.average),
                     format_double(tpm.untouched), format_double(amp), format_double(refl),
                     regime_label(s)});
        }
        csv.close();
        auto meta = cfg.echo();
        meta["sweep_parameter"] = sweep.parameter;
        meta["sweep_values"] = sweep.values;
        write_json_file(out_path(opt, "sweep_meta.json").string(), meta);
    });
}

int run_resource(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        const Session s = Session::open(cfg, opt);
        const double gamma = cfg.clock.gamma;
        // the clock mirrors the collision packet under E_A = gamma p
        const double sigma_e = (s.p0 / s.mass) * s.sigma_p;
        const double p0_a = cfg.clock.p0 ? *cfg.clock.p0 : s.ep0 / gamma;
        const double sigma_a = cfg.clock.sigma_p ? *cfg.clock.sigma_p : sigma_e / gamma;
        const double x0_a = cfg.clock.x0 ? *cfg.clock.x0 : s.x0;
        const int points = cfg.clock.points ? *cfg.clock.points : cfg.grid.points;
        double max_gap = 0.0;
        check(sw_system_max_gap(s.sys.get(), &max_gap));
        const double half_width =
            cfg.clock.span_sigmas * sigma_a + max_gap / gamma + 2.0 * sigma_a;

        sw_clock* clk_raw = nullptr;
        check(sw_clock_create(gamma, p0_a, sigma_a, x0_a, s.hbar, points, half_width, &clk_raw));
        Handle<sw_clock, sw_clock_free> clk(clk_raw);

        const int n = sw_clock_grid_size(clk.get());
        std::vector<double> pgrid(static_cast<std::size_t>(n));
        check(sw_clock_grid_points(clk.get(), pgrid.data()));

        const auto v_s = s.drive_unitary();
        std::vector<double> identity(static_cast<std::size_t>(2 * s.dim * s.dim), 0.0);
        for (int j = 0; j < s.dim; ++j)
            identity[2 * static_cast<std::size_t>(j * s.dim + j)] = 1.0;

        std::vector<double> dens_final(pgrid.size()), dens_initial(pgrid.size());
        check(sw_resource_final_momentum(s.sys.get(), s.rho.get(), clk.get(), v_s.data(),
                                         dens_final.data()));
        check(sw_resource_final_momentum(s.sys.get(), s.rho.get(), clk.get(), identity.data(),
                                         dens_initial.data()));
        std::vector<double> e_grid(pgrid.size()), e_final(pgrid.size()), e_initial(pgrid.size());
        check(sw_resource_energy_distribution(gamma, n, pgrid.data(), dens_final.data(),
                                              e_grid.data(), e_final.data()));
        check(sw_resource_energy_distribution(gamma, n, pgrid.data(), dens_initial.data(),
                                              e_grid.data(), e_initial.data()));

        auto params = cfg.echo();
        params["clock"] = {{"gamma", gamma}, {"p0", p0_a}, {"sigma_p", sigma_a}, {"x0", x0_a}};
        CsvWriter csv(out_path(opt, "resource.csv").string(), "resource", params,
                      {"E_A", "density_initial", "density_final"});
        for (std::size_t i = 0; i < pgrid.size(); ++i)
            csv.row({e_grid[i], e_initial[i], e_final[i]});
        csv.close();

        auto meta = cfg.echo();
        meta["clock"] = params["clock"];
        meta["grid_points"] = n;
        write_json_file(out_path(opt, "resource_meta.json").string(), meta);
    });
}

int run_fig1(const ExperimentConfig& cfg, const RunOptions& opt) {
    return guarded([&] {
        // panels 1 and 2: distributions at the preset widths, thermal and coherent
        for (std::size_t panel = 0; panel < cfg.run.fig1_sigma_bars.size(); ++panel) {
            const double sigma_bar = cfg.run.fig1_sigma_bars[panel];
            const Session th = Session::open(cfg, opt, sigma_bar);
            const Session coh = Session::open(cfg, opt, sigma_bar, -1.0, true);
            const auto grid = th.make_grid(cfg);
            const int n = sw_grid_size(grid.get());
            std::vector<double> ep(static_cast<std::size_t>(n));
            check(sw_grid_points(grid.get(), ep.data()));
            std::vector<double> initial(ep.size()), f_th(ep.size()), f_coh(ep.size());
            check(sw_initial_distribution(th.pk.get(), grid.get(), initial.data(), nullptr));
            check(sw_final_distribution(th.sys.get(), th.rho.get(), th.pk.get(), th.pot.get(),
                                        grid.get(), th.threads, f_th.data(), nullptr));
            check(sw_final_distribution(coh.sys.get(), coh.rho.get(), coh.pk.get(), coh.pot.get(),
                                        grid.get(), coh.threads, f_coh.data(), nullptr));
            auto params = cfg.echo();
            params["sigma_bar_p"] = sigma_bar;
            CsvWriter csv(out_path(opt, "panel" + std::to_string(panel + 1) + ".csv").string(),
                          "fig1", params,
                          {"E_p", "density_initial", "density_final_thermal",
                           "density_final_coherent"});
            for (std::size_t i = 0; i < ep.size(); ++i)
                csv.row({ep[i], initial[i], f_th[i], f_coh[i]});
            csv.close();
        }

        // panel 3: energy-change sweep against the two drive-side references
        std::vector<double> sigma_bars;
        if (cfg.run.sweep && cfg.run.sweep->parameter == "sigma_bar_p") {
            sigma_bars = cfg.run.sweep->values;
        } else {
            for (int i = 0; i < 13; ++i)
                sigma_bars.push_back(0.05 * std::pow(20.0 / 0.05, i / 12.0));
        }

        // the TPM references do not depend on the packet width
        const Session th0 = Session::open(cfg, opt, sigma_bars.front());
        const Session coh0 = Session::open(cfg, opt, sigma_bars.front(), -1.0, true);
        const auto u = th0.drive_unitary();
        const auto tpm_th = tpm_summary(th0, u);
        const auto tpm_coh = tpm_summary(coh0, u);

        auto params = cfg.echo();
        params["sigma_bar_values"] = sigma_bars;
        CsvWriter csv(out_path(opt, "panel3.csv").string(), "fig1", params,
                      {"sigma_bar_p", "kinetic_energy_change_thermal",
                       "kinetic_energy_change_coherent", "tpm_average", "untouched_work_thermal",
                       "untouched_work_coherent"});
        for (double sb : sigma_bars) {
            const Session th = Session::open(cfg, opt, sb);
            const Session coh = Session::open(cfg, opt, sb, -1.0, true);
            double dex_th = 0.0, dex_coh = 0.0;
            check(sw_kinetic_energy_change(th.sys.get(), th.rho.get(), th.pk.get(), th.pot.get(),
                                           &dex_th));
            check(sw_kinetic_energy_change(coh.sys.get(), coh.rho.get(), coh.pk.get(),
                                           coh.pot.get(), &dex_coh));
            csv.row({sb, dex_th, dex_coh, tpm_th.average, tpm_th.untouched, tpm_coh.untouched});
        }
        csv.close();

        auto meta = cfg.echo();
        meta["tpm_average"] = tpm_th.average;
        meta["untouched_work_thermal"] = tpm_th.untouched;
        meta["untouched_work_coherent"] = tpm_coh.untouched;
        meta["sigma_bar_values"] = sigma_bars;
        write_json_file(out_path(opt, "fig1_meta.json").string(), meta);
    });
}

} // namespace swcli

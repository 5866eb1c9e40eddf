// capi.cpp — extern-C shim over the C++ core: opaque handles, error codes,
// thread-local error messages.

#include "scatterwork/scatterwork.h"

#include <cstring>
#include <string>

#include "collision/collision.hpp"
#include "core/system.hpp"
#include "packet/packet.hpp"
#include "resource/resource.hpp"
#include "semiclassical/semiclassical.hpp"
#include "tpm/tpm.hpp"

namespace {

using namespace scatterwork;

thread_local std::string g_last_error;

sw_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return SW_ERR_INVALID_ARGUMENT;
        case ErrorCode::validation: return SW_ERR_VALIDATION;
        case ErrorCode::threshold_proximity: return SW_ERR_THRESHOLD_PROXIMITY;
        case ErrorCode::singular_matching: return SW_ERR_SINGULAR_MATCHING;
        case ErrorCode::numerical: return SW_ERR_NUMERICAL;
        case ErrorCode::domain: return SW_ERR_DOMAIN;
        case ErrorCode::grid: return SW_ERR_GRID;
    }
    return SW_ERR_UNKNOWN;
}

template <typename F>
sw_status guarded(F&& f) {
    try {
        f();
        return SW_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SW_ERR_UNKNOWN;
    } catch (...) {
        g_last_error = "unknown error";
        return SW_ERR_UNKNOWN;
    }
}

core::Matrix matrix_from_interleaved(int dim, const double* data) {
    core::Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const int base = 2 * (i * dim + j);
            m(i, j) = core::Complex(data[base], data[base + 1]);
        }
    return m;
}

void matrix_to_interleaved(const core::Matrix& m, double* out) {
    const int rows = static_cast<int>(m.rows());
    const int cols = static_cast<int>(m.cols());
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const int base = 2 * (i * cols + j);
            out[base] = m(i, j).real();
            out[base + 1] = m(i, j).imag();
        }
}

template <typename T>
void require(const T* p, const char* name) {
    if (!p) throw InvalidArgumentError(std::string(name) + " must not be null");
}

void copy_distribution(const collision::EnergyDistribution& dist, double* density_out,
                       double* norm_drift) {
    std::memcpy(density_out, dist.density.data(),
                static_cast<std::size_t>(dist.density.size()) * sizeof(double));
    if (norm_drift) *norm_drift = dist.meta.normalization_drift;
}

} // namespace

struct sw_system {
    core::SystemSpec spec;
};
struct sw_density {
    core::DensityMatrix rho;
};
struct sw_packet {
    packet::GaussianPacket pk;
};
struct sw_potential {
    channels::PotentialProfile pot;
};
struct sw_grid {
    packet::EnergyGrid grid;
};
struct sw_clock {
    resource::ClockSystem clock;
};

extern "C" {

const char* sw_version(void) { return SW_VERSION; }

const char* sw_last_error(void) { return g_last_error.c_str(); }

sw_status sw_system_create(int dim, const double* energies, const double* coupling, double hbar,
                           sw_system** out) {
    return guarded([&] {
        require(energies, "energies");
        require(coupling, "coupling");
        require(out, "out");
        core::Vector e(dim);
        for (int j = 0; j < dim; ++j) e(j) = energies[j];
        *out = new sw_system{core::SystemSpec(std::move(e), matrix_from_interleaved(dim, coupling),
                                              hbar)};
    });
}

void sw_system_free(sw_system* sys) { delete sys; }

int sw_system_dim(const sw_system* sys) { return sys ? sys->spec.dim() : 0; }

sw_status sw_system_energies(const sw_system* sys, double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(out, "out");
        for (int j = 0; j < sys->spec.dim(); ++j) out[j] = sys->spec.energy(j);
    });
}

sw_status sw_system_max_gap(const sw_system* sys, double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(out, "out");
        *out = sys->spec.gaps().max_gap();
    });
}

sw_status sw_density_thermal(const sw_system* sys, double beta, sw_density** out) {
    return guarded([&] {
        require(sys, "sys");
        require(out, "out");
        *out = new sw_density{core::thermal_state(sys->spec, beta)};
    });
}

sw_status sw_density_coherent_thermal(const sw_system* sys, double beta, sw_density** out) {
    return guarded([&] {
        require(sys, "sys");
        require(out, "out");
        *out = new sw_density{core::coherent_thermal_state(sys->spec, beta)};
    });
}

sw_status sw_density_create(int dim, const double* mat, sw_density** out) {
    return guarded([&] {
        require(mat, "mat");
        require(out, "out");
        *out = new sw_density{core::DensityMatrix(matrix_from_interleaved(dim, mat))};
    });
}

sw_status sw_density_get(const sw_density* rho, double* mat_out) {
    return guarded([&] {
        require(rho, "rho");
        require(mat_out, "mat_out");
        matrix_to_interleaved(rho->rho.mat(), mat_out);
    });
}

void sw_density_free(sw_density* rho) { delete rho; }

sw_status sw_packet_create(double p0, double sigma_p, double x0, double mass, double hbar,
                           sw_packet** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sw_packet{packet::GaussianPacket(p0, sigma_p, x0, mass, hbar)};
    });
}

void sw_packet_free(sw_packet* pk) { delete pk; }

sw_status sw_packet_info(const sw_packet* pk, double* v0, double* sigma_x,
                         double* mean_kinetic_energy, int* marginal_right_moving) {
    return guarded([&] {
        require(pk, "pk");
        if (v0) *v0 = pk->pk.v0();
        if (sigma_x) *sigma_x = pk->pk.sigma_x();
        if (mean_kinetic_energy) *mean_kinetic_energy = pk->pk.mean_kinetic_energy();
        if (marginal_right_moving) *marginal_right_moving = pk->pk.marginal_right_moving() ? 1 : 0;
    });
}

sw_status sw_potential_barrier(double v0, double a, sw_potential** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sw_potential{channels::PotentialProfile::barrier(v0, a)};
    });
}

sw_status sw_potential_create(int nseg, const double* widths, const double* values,
                              sw_potential** out) {
    return guarded([&] {
        require(widths, "widths");
        require(values, "values");
        require(out, "out");
        std::vector<std::pair<double, double>> parts;
        for (int i = 0; i < nseg; ++i) parts.emplace_back(widths[i], values[i]);
        *out = new sw_potential{channels::PotentialProfile::from_widths(parts)};
    });
}

void sw_potential_free(sw_potential* pot) { delete pot; }

sw_status sw_grid_create(double lo, double hi, int n, const sw_system* sys_or_null,
                         sw_grid** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sw_grid{packet::EnergyGrid::uniform(
            lo, hi, static_cast<std::size_t>(n), sys_or_null ? &sys_or_null->spec : nullptr)};
    });
}

sw_status sw_grid_for_packet(const sw_packet* pk, const sw_system* sys, int n, double span_sigmas,
                             sw_grid** out) {
    return guarded([&] {
        require(pk, "pk");
        require(sys, "sys");
        require(out, "out");
        *out = new sw_grid{packet::EnergyGrid::for_packet(pk->pk, sys->spec,
                                                          static_cast<std::size_t>(n),
                                                          span_sigmas)};
    });
}

int sw_grid_size(const sw_grid* grid) {
    return grid ? static_cast<int>(grid->grid.size()) : 0;
}

sw_status sw_grid_points(const sw_grid* grid, double* out) {
    return guarded([&] {
        require(grid, "grid");
        require(out, "out");
        std::memcpy(out, grid->grid.points.data(), grid->grid.size() * sizeof(double));
    });
}

void sw_grid_free(sw_grid* grid) { delete grid; }

sw_status sw_constant_pulse_unitary(const sw_system* sys, double v0, double tau, double* u_out) {
    return guarded([&] {
        require(sys, "sys");
        require(u_out, "u_out");
        const auto drive = tpm::DriveProtocol::constant_pulse(v0, tau);
        matrix_to_interleaved(tpm::propagate_interaction(sys->spec, drive), u_out);
    });
}

sw_status sw_semiclassical_unitary(const sw_system* sys, const sw_potential* pot, double ep,
                                   double mass, double tol, double* u_out) {
    return guarded([&] {
        require(sys, "sys");
        require(pot, "pot");
        require(u_out, "u_out");
        matrix_to_interleaved(
            semiclassical::semiclassical_s(sys->spec, pot->pot, ep, mass, tol), u_out);
    });
}

sw_status sw_tpm_comb(const sw_system* sys, const double* u, const sw_density* rho, int* natoms,
                      double* w_out, double* weight_out) {
    return guarded([&] {
        require(sys, "sys");
        require(u, "u");
        require(rho, "rho");
        require(natoms, "natoms");
        const auto comb = tpm::tpm_distribution(matrix_from_interleaved(sys->spec.dim(), u),
                                                rho->rho, sys->spec);
        *natoms = static_cast<int>(comb.atoms.size());
        if (w_out && weight_out) {
            for (std::size_t i = 0; i < comb.atoms.size(); ++i) {
                w_out[i] = comb.atoms[i].w;
                weight_out[i] = comb.atoms[i].weight;
            }
        }
    });
}

sw_status sw_tpm_average(const sw_system* sys, const double* u, const sw_density* rho,
                         double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(u, "u");
        require(rho, "rho");
        require(out, "out");
        *out = tpm::tpm_average(tpm::tpm_distribution(
            matrix_from_interleaved(sys->spec.dim(), u), rho->rho, sys->spec));
    });
}

sw_status sw_untouched_work(const sw_system* sys, const double* u, const sw_density* rho,
                            double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(u, "u");
        require(rho, "rho");
        require(out, "out");
        *out = tpm::untouched_work(matrix_from_interleaved(sys->spec.dim(), u), rho->rho,
                                   sys->spec);
    });
}

sw_status sw_post_tpm_state(const sw_system* sys, const double* u, const sw_density* rho,
                            sw_density** out) {
    return guarded([&] {
        require(sys, "sys");
        require(u, "u");
        require(rho, "rho");
        require(out, "out");
        *out = new sw_density{
            tpm::post_tpm_state(matrix_from_interleaved(sys->spec.dim(), u), rho->rho)};
    });
}

sw_status sw_smatrix(const sw_system* sys, const sw_potential* pot, double mass,
                     double total_energy, double* blocks, int* open_flags,
                     double* unitarity_defect) {
    return guarded([&] {
        require(sys, "sys");
        require(pot, "pot");
        const auto s = channels::s_matrix(sys->spec, pot->pot, mass, total_energy);
        if (blocks) matrix_to_interleaved(s.extended_matrix(), blocks);
        if (open_flags)
            for (int j = 0; j < s.dim(); ++j) open_flags[j] = s.open(j) ? 1 : 0;
        if (unitarity_defect) *unitarity_defect = s.unitarity_defect();
    });
}

sw_status sw_single_channel_barrier(double kinetic_energy, double v0, double a, double mass,
                                    double hbar, double* t_re, double* t_im, double* r_re,
                                    double* r_im) {
    return guarded([&] {
        const auto amp = channels::single_channel_barrier(kinetic_energy, v0, a, mass, hbar);
        if (t_re) *t_re = amp.t.real();
        if (t_im) *t_im = amp.t.imag();
        if (r_re) *r_re = amp.r.real();
        if (r_im) *r_im = amp.r.imag();
    });
}

sw_status sw_transition_probability(const sw_system* sys, const sw_potential* pot, double mass,
                                    double total_energy, int j_from, int j_to, double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(pot, "pot");
        require(out, "out");
        const auto s = channels::s_matrix(sys->spec, pot->pot, mass, total_energy);
        *out = channels::transition_probability(s, j_from, j_to);
    });
}

sw_status sw_classify_regime(const sw_packet* pk, const sw_system* sys, const sw_potential* pot,
                             sw_regime_report* out) {
    return guarded([&] {
        require(pk, "pk");
        require(sys, "sys");
        require(pot, "pot");
        require(out, "out");
        const auto rep = packet::classify_regime(pk->pk, sys->spec, pot->pot);
        out->right_moving = rep.find("right_moving").ratio;
        out->narrow_energy = rep.find("narrow_energy").ratio;
        out->semiclassical_potential = rep.find("semiclassical_potential").ratio;
        out->semiclassical_action = rep.find("semiclassical_action").ratio;
        out->semiclassical_gap = rep.find("semiclassical_gap").ratio;
        out->broad_energy = rep.find("broad_energy").ratio;
        out->broad_time = rep.find("broad_time").ratio;
        switch (rep.overall) {
            case packet::RegimeLabel::narrow: out->overall = SW_REGIME_NARROW; break;
            case packet::RegimeLabel::broad: out->overall = SW_REGIME_BROAD; break;
            case packet::RegimeLabel::intermediate: out->overall = SW_REGIME_INTERMEDIATE; break;
            case packet::RegimeLabel::non_semiclassical:
                out->overall = SW_REGIME_NON_SEMICLASSICAL;
                break;
        }
    });
}

sw_status sw_initial_distribution(const sw_packet* pk, const sw_grid* grid, double* density_out,
                                  double* norm_drift) {
    return guarded([&] {
        require(pk, "pk");
        require(grid, "grid");
        require(density_out, "density_out");
        copy_distribution(collision::initial_distribution(pk->pk, grid->grid), density_out,
                          norm_drift);
    });
}

sw_status sw_final_distribution(const sw_system* sys, const sw_density* rho, const sw_packet* pk,
                                const sw_potential* pot, const sw_grid* grid, int threads,
                                double* density_out, double* norm_drift) {
    return guarded([&] {
        require(sys, "sys");
        require(rho, "rho");
        require(pk, "pk");
        require(pot, "pot");
        require(grid, "grid");
        require(density_out, "density_out");
        copy_distribution(collision::final_energy_distribution(sys->spec, rho->rho, pk->pk,
                                                               pot->pot, grid->grid, threads),
                          density_out, norm_drift);
    });
}

sw_status sw_narrow_limit_distribution(const sw_system* sys, const sw_density* rho,
                                       const sw_packet* pk, const sw_potential* pot,
                                       const sw_grid* grid, int threads, int allow_regime_override,
                                       double* density_out, double* norm_drift) {
    return guarded([&] {
        require(sys, "sys");
        require(rho, "rho");
        require(pk, "pk");
        require(pot, "pot");
        require(grid, "grid");
        require(density_out, "density_out");
        copy_distribution(
            collision::narrow_limit_distribution(sys->spec, rho->rho, pk->pk, pot->pot, grid->grid,
                                                 threads, allow_regime_override != 0),
            density_out, norm_drift);
    });
}

sw_status sw_convolve_comb(const sw_packet* pk, int natoms, const double* w,
                           const double* weights, const sw_grid* grid, double* density_out,
                           double* norm_drift) {
    return guarded([&] {
        require(pk, "pk");
        require(w, "w");
        require(weights, "weights");
        require(grid, "grid");
        require(density_out, "density_out");
        tpm::DeltaComb comb;
        for (int i = 0; i < natoms; ++i) comb.atoms.push_back({w[i], weights[i]});
        copy_distribution(collision::semiclassical_convolution(comb, pk->pk, grid->grid),
                          density_out, norm_drift);
    });
}

sw_status sw_kinetic_energy_change(const sw_system* sys, const sw_density* rho,
                                   const sw_packet* pk, const sw_potential* pot, double* out) {
    return guarded([&] {
        require(sys, "sys");
        require(rho, "rho");
        require(pk, "pk");
        require(pot, "pot");
        require(out, "out");
        *out = collision::kinetic_energy_change(sys->spec, rho->rho, pk->pk, pot->pot);
    });
}

sw_status sw_total_variation(const sw_grid* grid, const double* f, const double* g, double* out) {
    return guarded([&] {
        require(grid, "grid");
        require(f, "f");
        require(g, "g");
        require(out, "out");
        const auto n = static_cast<Eigen::Index>(grid->grid.size());
        Eigen::VectorXd diff(n);
        for (Eigen::Index i = 0; i < n; ++i) diff[i] = std::abs(f[i] - g[i]);
        *out = 0.5 * collision::trapezoid(grid->grid, diff);
    });
}

sw_status sw_semiclassical_defect(const sw_system* sys, const sw_potential* pot, double mass,
                                  double ep, double* amplitude_defect,
                                  double* reflection_probability) {
    return guarded([&] {
        require(sys, "sys");
        require(pot, "pot");
        const auto rep = semiclassical::semiclassical_defect(sys->spec, pot->pot, mass, ep);
        if (amplitude_defect) *amplitude_defect = rep.amplitude_defect;
        if (reflection_probability) *reflection_probability = rep.reflection_probability;
    });
}

sw_status sw_clock_create(double gamma, double p0, double sigma_p, double x0, double hbar,
                          int n_points, double half_width, sw_clock** out) {
    return guarded([&] {
        require(out, "out");
        *out = new sw_clock{resource::ClockSystem::gaussian(
            gamma, p0, sigma_p, x0, hbar, static_cast<std::size_t>(n_points), half_width)};
    });
}

void sw_clock_free(sw_clock* clk) { delete clk; }

int sw_clock_grid_size(const sw_clock* clk) {
    return clk ? static_cast<int>(clk->clock.grid().size()) : 0;
}

sw_status sw_clock_grid_points(const sw_clock* clk, double* out) {
    return guarded([&] {
        require(clk, "clk");
        require(out, "out");
        std::memcpy(out, clk->clock.grid().points.data(),
                    clk->clock.grid().size() * sizeof(double));
    });
}

sw_status sw_resource_final_momentum(const sw_system* sys, const sw_density* rho,
                                     const sw_clock* clk, const double* v_s,
                                     double* density_out) {
    return guarded([&] {
        require(sys, "sys");
        require(rho, "rho");
        require(clk, "clk");
        require(v_s, "v_s");
        require(density_out, "density_out");
        const auto dist = resource::resource_final_momentum_distribution(
            rho->rho, clk->clock, matrix_from_interleaved(sys->spec.dim(), v_s), sys->spec);
        std::memcpy(density_out, dist.density.data(),
                    static_cast<std::size_t>(dist.density.size()) * sizeof(double));
    });
}

sw_status sw_resource_energy_distribution(double gamma, int n, const double* p_grid,
                                          const double* density_p, double* e_grid_out,
                                          double* density_e_out) {
    return guarded([&] {
        require(p_grid, "p_grid");
        require(density_p, "density_p");
        require(e_grid_out, "e_grid_out");
        require(density_e_out, "density_e_out");
        if (!(gamma > 0.0)) throw InvalidArgumentError("gamma must be positive");
        for (int i = 0; i < n; ++i) {
            e_grid_out[i] = gamma * p_grid[i];
            density_e_out[i] = density_p[i] / gamma;
        }
    });
}

} // extern "C"

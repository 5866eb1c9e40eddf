#include "collision/collision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "support/parallel.hpp"
#include "support/quadrature.hpp"

namespace scatterwork::collision {

double trapezoid(const EnergyGrid& grid, const Eigen::VectorXd& values) {
    const std::size_t n = grid.size();
    if (values.size() != static_cast<Eigen::Index>(n))
        throw InvalidArgumentError("trapezoid: grid/value size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc += 0.5 * (values[i] + values[i + 1]) * (grid.points[i + 1] - grid.points[i]);
    return acc;
}

double total_variation(const EnergyDistribution& f, const EnergyDistribution& g) {
    if (f.grid.size() != g.grid.size())
        throw InvalidArgumentError("total_variation: distributions live on different grids");
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        if (f.grid.points[i] != g.grid.points[i])
            throw InvalidArgumentError("total_variation: distributions live on different grids");
    return 0.5 * trapezoid(f.grid, (f.density - g.density).cwiseAbs());
}

namespace {

// clip tiny negative noise, check drift, renormalize to exactly 1
EnergyDistribution finalize(EnergyGrid grid, Eigen::VectorXd density, DistributionMeta meta) {
    const double peak = std::max(1e-300, density.maxCoeff());
    const double neg_floor = -1e-12 * std::max(1.0, peak);
    double clipped = 0.0;
    for (Eigen::Index i = 0; i < density.size(); ++i) {
        if (density[i] < neg_floor) {
            std::ostringstream msg;
            msg << meta.provenance << ": density " << density[i] << " at E = "
                << grid.points[static_cast<std::size_t>(i)] << " is below the clipping floor";
            throw NumericalError(msg.str());
        }
        if (density[i] < 0.0) {
            clipped -= density[i];
            density[i] = 0.0;
        }
    }
    const double integral = trapezoid(grid, density);
    const double drift = std::abs(integral - 1.0);
    if (drift > 1e-4) {
        std::ostringstream msg;
        msg << meta.provenance << ": normalization drift " << drift
            << " exceeds 1e-4; shifted replicas may be clipped, use a wider grid";
        throw GridError(msg.str());
    }
    density /= integral;
    meta.normalization_drift = drift;
    meta.clipped_mass = clipped;
    EnergyDistribution out;
    out.grid = std::move(grid);
    out.density = std::move(density);
    out.meta = std::move(meta);
    return out;
}

double diagonal_density(const GaussianPacket& pk, double e) {
    if (e <= 0.0) return 0.0;
    return std::norm(pk.energy_amplitude(e));
}

} // namespace

SMatrixTable SMatrixTable::build(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                                 const EnergyGrid& grid, int threads) {
    SMatrixTable table;
    table.dim_ = sys.dim();
    const std::size_t n = grid.size();
    table.entries_.resize(n * static_cast<std::size_t>(table.dim_));
    parallel_for(n, threads, [&](std::size_t i) {
        for (int jp = 0; jp < table.dim_; ++jp) {
            const double e_total = grid.points[i] + sys.energy(jp);
            table.entries_[i * static_cast<std::size_t>(table.dim_) + static_cast<std::size_t>(jp)]
                .emplace(channels::s_matrix(sys, pot, mass, e_total));
        }
    });
    return table;
}

const ScatteringMatrix& SMatrixTable::at(std::size_t grid_index, int jp) const {
    return *entries_[grid_index * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(jp)];
}

EnergyDistribution initial_distribution(const GaussianPacket& pk, const EnergyGrid& grid) {
    Eigen::VectorXd density(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        density[static_cast<Eigen::Index>(i)] = diagonal_density(pk, grid.points[i]);
    DistributionMeta meta;
    meta.provenance = "initial";
    return finalize(grid, std::move(density), std::move(meta));
}

EnergyDistribution final_energy_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, int threads) {
    const SMatrixTable table = SMatrixTable::build(sys, pot, pk.mass(), grid, threads);
    return final_energy_distribution(sys, rho, pk, pot, grid, table, threads);
}

EnergyDistribution final_energy_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk,
                                             const PotentialProfile& /*pot: baked into table*/,
                                             const EnergyGrid& grid, const SMatrixTable& table,
                                             int threads) {
    const int n = sys.dim();
    if (rho.dim() != n) throw InvalidArgumentError("final_energy_distribution: dimension mismatch");
    const std::size_t m = grid.size();
    Eigen::VectorXd density(static_cast<Eigen::Index>(m));
    Eigen::VectorXd imag_residue(static_cast<Eigen::Index>(m));
    parallel_for(m, threads, [&](std::size_t i) {
        const double ep = grid.points[i];
        Complex acc(0.0, 0.0);
        for (int jp = 0; jp < n; ++jp) {
            const ScatteringMatrix& s = table.at(i, jp);
            const auto& tpp = s.transmission_lr();
            const auto& rmp = s.reflection_left();
            for (int j = 0; j < n; ++j) {
                const double ej_shift = ep + sys.energy(jp) - sys.energy(j);
                if (ej_shift <= 0.0) continue;
                for (int k = 0; k < n; ++k) {
                    const Complex rjk = rho(j, k);
                    if (rjk == Complex(0.0, 0.0)) continue;
                    const double ek_shift = ep + sys.energy(jp) - sys.energy(k);
                    if (ek_shift <= 0.0) continue;
                    const Complex msum = tpp(jp, j) * std::conj(tpp(jp, k)) +
                                         rmp(jp, j) * std::conj(rmp(jp, k));
                    acc += rjk * pk.energy_dm_element(ej_shift, ek_shift) * msum;
                }
            }
        }
        density[static_cast<Eigen::Index>(i)] = acc.real();
        imag_residue[static_cast<Eigen::Index>(i)] = std::abs(acc.imag());
    });
    DistributionMeta meta;
    meta.provenance = "final_exact";
    meta.max_imag_residue = imag_residue.maxCoeff();
    if (meta.max_imag_residue > 1e-8 * std::max(1.0, density.maxCoeff()))
        throw NumericalError("final distribution has non-Hermitian imaginary residue " +
                             std::to_string(meta.max_imag_residue));
    return finalize(grid, std::move(density), std::move(meta));
}

double kinetic_energy_change(const SystemSpec& sys, const DensityMatrix& rho,
                             const GaussianPacket& pk, const PotentialProfile& pot,
                             double quad_tol) {
    const int n = sys.dim();
    if (rho.dim() != n) throw InvalidArgumentError("kinetic_energy_change: dimension mismatch");
    const double e0 = pk.mean_kinetic_energy();
    const double half_width = 12.0 * pk.sigma_e();
    const double e_min = sys.energies().minCoeff();
    const double e_max = sys.energies().maxCoeff();
    const double lo = std::max(e_min + 2.0 * channels::kDefaultThresholdGuard,
                               e0 + e_min - half_width);
    const double hi = e0 + e_max + half_width;

    double max_imag = 0.0;
    const auto integrand = [&](double e_total) -> double {
        const ScatteringMatrix s = channels::s_matrix(sys, pot, pk.mass(), e_total);
        const auto& tpp = s.transmission_lr();
        const auto& rmp = s.reflection_left();
        Complex acc(0.0, 0.0);
        for (int jp = 0; jp < n; ++jp) {
            Complex row(0.0, 0.0);
            for (int j = 0; j < n; ++j) {
                const double ej = e_total - sys.energy(j);
                if (ej <= 0.0) continue;
                for (int k = 0; k < n; ++k) {
                    const Complex rjk = rho(j, k);
                    if (rjk == Complex(0.0, 0.0)) continue;
                    const double ek = e_total - sys.energy(k);
                    if (ek <= 0.0) continue;
                    const Complex msum = tpp(jp, j) * std::conj(tpp(jp, k)) +
                                         rmp(jp, j) * std::conj(rmp(jp, k));
                    row += rjk * pk.energy_dm_element(ej, ek) * msum;
                }
            }
            acc += sys.energy(jp) * row;
        }
        max_imag = std::max(max_imag, std::abs(acc.imag()));
        return acc.real();
    };

    std::vector<double> thresholds(sys.energies().data(), sys.energies().data() + n);
    const auto result = integrate_split(integrand, lo, hi, thresholds, quad_tol);
    const double initial_energy = (sys.hamiltonian() * rho.mat()).trace().real();
    const double change = initial_energy - result.value;
    if (max_imag > 1e-10 * (1.0 + std::abs(change)))
        throw NumericalError("kinetic_energy_change: imaginary residue " +
                             std::to_string(max_imag));
    return change;
}

EnergyDistribution narrow_limit_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, int threads,
                                             bool regime_override) {
    const SMatrixTable table = SMatrixTable::build(sys, pot, pk.mass(), grid, threads);
    return narrow_limit_distribution(sys, rho, pk, pot, grid, table, regime_override, threads);
}

EnergyDistribution narrow_limit_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, const SMatrixTable& table,
                                             bool regime_override, int threads) {
    const packet::RegimeReport report = packet::classify_regime(pk, sys, pot);
    const bool narrow = report.overall == packet::RegimeLabel::narrow;
    if (!narrow && !regime_override)
        throw DomainError("narrow_limit_distribution: packet regime is " +
                          packet::to_string(report.overall) +
                          ", not narrow; pass the override to proceed");
    const int n = sys.dim();
    const std::size_t m = grid.size();
    Eigen::VectorXd density = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    parallel_for(m, threads, [&](std::size_t i) {
        const double ep = grid.points[i];
        double acc = 0.0;
        for (int jp = 0; jp < n; ++jp) {
            const ScatteringMatrix& s = table.at(i, jp);
            for (int j = 0; j < n; ++j) {
                const double shifted = ep + sys.energy(jp) - sys.energy(j);
                if (shifted <= 0.0) continue;
                const double pj = std::norm(s.transmission_lr()(jp, j)) +
                                  std::norm(s.reflection_left()(jp, j));
                acc += pj * rho.population(j) * diagonal_density(pk, shifted);
            }
        }
        density[static_cast<Eigen::Index>(i)] = acc;
    });
    DistributionMeta meta;
    meta.provenance = "narrow_limit";
    meta.regime = packet::to_string(report.overall);
    meta.regime_override = regime_override && !narrow;
    return finalize(grid, std::move(density), std::move(meta));
}

EnergyDistribution semiclassical_convolution(const tpm::DeltaComb& comb, const GaussianPacket& pk,
                                             const EnergyGrid& grid) {
    Eigen::VectorXd density = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (const auto& atom : comb.atoms)
            acc += atom.weight * diagonal_density(pk, grid.points[i] - atom.w);
        density[static_cast<Eigen::Index>(i)] = acc;
    }
    DistributionMeta meta;
    meta.provenance = "comb_convolution";
    return finalize(grid, std::move(density), std::move(meta));
}

EnergyDistribution final_distribution_from_unitary(
    const SystemSpec& sys, const DensityMatrix& rho,
    const std::function<Complex(double, double)>& energy_kernel, const core::Matrix& v_s,
    const EnergyGrid& grid) {
    const int n = sys.dim();
    if (v_s.rows() != n || v_s.cols() != n || rho.dim() != n)
        throw InvalidArgumentError("final_distribution_from_unitary: dimension mismatch");
    if (core::unitarity_defect(v_s) > 1e-8)
        throw ValidationError("final_distribution_from_unitary: V_S is not unitary");
    Eigen::VectorXd density(static_cast<Eigen::Index>(grid.size()));
    double max_imag = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ep = grid.points[i];
        Complex acc(0.0, 0.0);
        for (int jp = 0; jp < n; ++jp)
            for (int j = 0; j < n; ++j) {
                if (v_s(jp, j) == Complex(0.0, 0.0)) continue;
                for (int k = 0; k < n; ++k) {
                    const Complex rjk = rho(j, k);
                    if (rjk == Complex(0.0, 0.0)) continue;
                    acc += rjk *
                           energy_kernel(ep + sys.energy(jp) - sys.energy(j),
                                         ep + sys.energy(jp) - sys.energy(k)) *
                           v_s(jp, j) * std::conj(v_s(jp, k));
                }
            }
        density[static_cast<Eigen::Index>(i)] = acc.real();
        max_imag = std::max(max_imag, std::abs(acc.imag()));
    }
    DistributionMeta meta;
    meta.provenance = "unitary_kernel";
    meta.max_imag_residue = max_imag;
    return finalize(grid, std::move(density), std::move(meta));
}

} // namespace scatterwork::collision

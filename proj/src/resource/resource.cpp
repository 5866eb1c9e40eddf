#include "resource/resource.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace scatterwork::resource {

ClockSystem::ClockSystem(double gamma, double p0, double sigma_p, double x0, double hbar,
                         packet::EnergyGrid momentum_grid)
    : gamma_(gamma), p0_(p0), sigma_p_(sigma_p), x0_(x0), hbar_(hbar),
      grid_(std::move(momentum_grid)) {
    if (!(gamma > 0.0)) throw ValidationError("clock speed gamma must be positive");
    if (!(sigma_p > 0.0) || !(hbar > 0.0))
        throw ValidationError("clock requires sigma_p > 0 and hbar > 0");
    norm_ = std::pow(2.0 * std::numbers::pi * sigma_p_ * sigma_p_, -0.25);
    // renormalize on the grid so the sampled state has unit trapezoid norm
    Eigen::VectorXd density(static_cast<Eigen::Index>(grid_.size()));
    for (std::size_t i = 0; i < grid_.size(); ++i)
        density[static_cast<Eigen::Index>(i)] = std::norm(amplitude(grid_.points[i]));
    const double total = collision::trapezoid(grid_, density);
    if (!(total > 0.0)) throw GridError("clock grid does not cover the packet support");
    norm_ /= std::sqrt(total);
}

ClockSystem ClockSystem::gaussian(double gamma, double p0, double sigma_p, double x0, double hbar,
                                  std::size_t n_points, double half_width) {
    if (n_points < 2) throw GridError("clock grid needs at least 2 points");
    if (!(half_width > 0.0)) throw GridError("clock grid half width must be positive");
    packet::EnergyGrid grid;
    grid.spacing = 2.0 * half_width / static_cast<double>(n_points - 1);
    grid.points.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        grid.points[i] = p0 - half_width + grid.spacing * static_cast<double>(i);
    return ClockSystem(gamma, p0, sigma_p, x0, hbar, std::move(grid));
}

Complex ClockSystem::amplitude(double p) const {
    const double d = (p - p0_) / (2.0 * sigma_p_);
    const double mag = norm_ * std::exp(-d * d);
    const double phase = -p * x0_ / hbar_;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

Complex ClockSystem::momentum_dm(double p1, double p2) const {
    return amplitude(p1) * std::conj(amplitude(p2));
}

EnergyDistribution resource_final_momentum_distribution(const DensityMatrix& rho,
                                                        const ClockSystem& clock,
                                                        const Matrix& v_s,
                                                        const SystemSpec& sys) {
    const int n = sys.dim();
    if (rho.dim() != n || v_s.rows() != n || v_s.cols() != n)
        throw InvalidArgumentError("resource distribution: dimension mismatch");
    if (core::unitarity_defect(v_s) > 1e-8)
        throw ValidationError("resource distribution: V_S is not unitary");

    const double max_shift = sys.gaps().max_gap() / clock.gamma();
    const auto& grid = clock.grid();
    const double needed_lo = clock.p0() - 6.0 * clock.sigma_p() - max_shift;
    const double needed_hi = clock.p0() + 6.0 * clock.sigma_p() + max_shift;
    if (grid.points.front() > needed_lo || grid.points.back() < needed_hi) {
        std::ostringstream msg;
        msg << "clock momentum grid [" << grid.points.front() << ", " << grid.points.back()
            << "] clips shifted replicas; needs to cover [" << needed_lo << ", " << needed_hi
            << "]";
        throw GridError(msg.str());
    }

    Eigen::VectorXd density(static_cast<Eigen::Index>(grid.size()));
    double max_imag = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = grid.points[i];
        Complex acc(0.0, 0.0);
        for (int jp = 0; jp < n; ++jp)
            for (int j = 0; j < n; ++j) {
                if (v_s(jp, j) == Complex(0.0, 0.0)) continue;
                const double pj = p + (sys.energy(jp) - sys.energy(j)) / clock.gamma();
                for (int k = 0; k < n; ++k) {
                    const Complex rjk = rho(j, k);
                    if (rjk == Complex(0.0, 0.0)) continue;
                    const double pk = p + (sys.energy(jp) - sys.energy(k)) / clock.gamma();
                    acc += rjk * clock.momentum_dm(pj, pk) * v_s(jp, j) * std::conj(v_s(jp, k));
                }
            }
        density[static_cast<Eigen::Index>(i)] = acc.real();
        max_imag = std::max(max_imag, std::abs(acc.imag()));
    }

    // same finalize policy as collision distributions
    const double peak = std::max(1e-300, density.maxCoeff());
    double clipped = 0.0;
    for (Eigen::Index i = 0; i < density.size(); ++i) {
        if (density[i] < -1e-12 * std::max(1.0, peak))
            throw NumericalError("resource distribution has a significantly negative density");
        if (density[i] < 0.0) {
            clipped -= density[i];
            density[i] = 0.0;
        }
    }
    const double integral = collision::trapezoid(grid, density);
    const double drift = std::abs(integral - 1.0);
    if (drift > 1e-4)
        throw GridError("resource distribution normalization drift " + std::to_string(drift) +
                        "; widen the clock grid");
    density /= integral;

    EnergyDistribution out;
    out.grid = grid;
    out.density = std::move(density);
    out.meta.provenance = "resource_momentum";
    out.meta.normalization_drift = drift;
    out.meta.clipped_mass = clipped;
    out.meta.max_imag_residue = max_imag;
    return out;
}

EnergyDistribution resource_energy_distribution(const EnergyDistribution& momentum_dist,
                                                double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgumentError("resource_energy_distribution: gamma must be positive");
    EnergyDistribution out;
    out.grid.points.resize(momentum_dist.grid.size());
    out.grid.spacing = momentum_dist.grid.spacing * gamma;
    out.density.resize(momentum_dist.density.size());
    for (std::size_t i = 0; i < momentum_dist.grid.size(); ++i) {
        out.grid.points[i] = gamma * momentum_dist.grid.points[i];
        out.density[static_cast<Eigen::Index>(i)] =
            momentum_dist.density[static_cast<Eigen::Index>(i)] / gamma;
    }
    out.meta = momentum_dist.meta;
    out.meta.provenance = "resource_energy";
    return out;
}

} // namespace scatterwork::resource

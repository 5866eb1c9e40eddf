// resource.hpp — clock-particle bridge: final momentum distribution of an
// auxiliary system with H_A = gamma * p after an energy-conserving unitary.

#pragma once

#include "collision/collision.hpp"
#include "core/system.hpp"
#include "packet/packet.hpp"

namespace scatterwork::resource {

using collision::EnergyDistribution;
using core::Complex;
using core::DensityMatrix;
using core::Matrix;
using core::SystemSpec;

// Auxiliary system A with H_A = gamma * p, prepared in a pure Gaussian
// momentum state evaluated on (and normalized over) a fixed momentum grid.
class ClockSystem {
public:
    ClockSystem(double gamma, double p0, double sigma_p, double x0, double hbar,
                packet::EnergyGrid momentum_grid);
    static ClockSystem gaussian(double gamma, double p0, double sigma_p, double x0, double hbar,
                                std::size_t n_points, double half_width);

    double gamma() const { return gamma_; }
    double p0() const { return p0_; }
    double sigma_p() const { return sigma_p_; }
    const packet::EnergyGrid& grid() const { return grid_; }

    Complex amplitude(double p) const;                    // psi_A(p), any real p
    Complex momentum_dm(double p1, double p2) const;      // psi_A(p1) psi_A*(p2)

private:
    double gamma_, p0_, sigma_p_, x0_, hbar_;
    double norm_ = 1.0;
    packet::EnergyGrid grid_;
};

// rho'_A(p) = sum_{j'jk} <j|rho|k> rho_A(p + D_{j'j}/gamma, p + D_{j'k}/gamma)
//             <j'|V_S|j> <j'|V_S|k>^*  on the clock's momentum grid.
EnergyDistribution resource_final_momentum_distribution(const DensityMatrix& rho,
                                                        const ClockSystem& clock,
                                                        const Matrix& v_s,
                                                        const SystemSpec& sys);

// Change of variables E_A = gamma * p: density transforms with Jacobian 1/gamma.
EnergyDistribution resource_energy_distribution(const EnergyDistribution& momentum_dist,
                                                double gamma);

} // namespace scatterwork::resource

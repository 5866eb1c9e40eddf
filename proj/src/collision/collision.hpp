// collision.hpp — post-collision kinetic-energy distribution, average
// kinetic-energy change, narrow-limit and comb-convolution predictions.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "channels/channels.hpp"
#include "core/system.hpp"
#include "packet/packet.hpp"
#include "tpm/tpm.hpp"

namespace scatterwork::collision {

using channels::PotentialProfile;
using channels::ScatteringMatrix;
using core::Complex;
using core::DensityMatrix;
using core::SystemSpec;
using packet::EnergyGrid;
using packet::GaussianPacket;

struct DistributionMeta {
    std::string provenance;
    std::string regime;
    bool regime_override = false;
    double normalization_drift = 0.0;  // |raw integral - 1| before renormalization
    double clipped_mass = 0.0;         // negative quadrature noise removed
    double max_imag_residue = 0.0;
};

// Probability density on a kinetic-energy grid; trapezoidal integral 1.
struct EnergyDistribution {
    EnergyGrid grid;
    Eigen::VectorXd density;
    DistributionMeta meta;
};

double trapezoid(const EnergyGrid& grid, const Eigen::VectorXd& values);

// (1/2) integral |f - g| dE on a shared grid.
double total_variation(const EnergyDistribution& f, const EnergyDistribution& g);

// Scattering matrices at every shifted energy grid[i] + e_{j'}, built once in
// a parallel map and then shared read-only.
class SMatrixTable {
public:
    static SMatrixTable build(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                              const EnergyGrid& grid, int threads = 0);
    const ScatteringMatrix& at(std::size_t grid_index, int jp) const;

private:
    std::vector<std::optional<ScatteringMatrix>> entries_;
    int dim_ = 0;
};

EnergyDistribution initial_distribution(const GaussianPacket& pk, const EnergyGrid& grid);

// Exact final kinetic-energy distribution: rho'(E_p) = sum_{j'jk} <j|rho|k>
// rho_X(E_p+D_{j'j}, E_p+D_{j'k}) sum_a s^{(a+)}_{j'j} [s^{(a+)}_{j'k}]^* at
// total energy E_p + e_{j'}.
EnergyDistribution final_energy_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, int threads = 0);
EnergyDistribution final_energy_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, const SMatrixTable& table,
                                             int threads = 0);

// Average kinetic-energy change from the total-energy integral form:
// Tr[H_S rho] - sum_{j'jk} e_{j'} <j|rho|k> int dE rho_X(E-e_j, E-e_k)
// sum_a s^{(a+)}_{j'j}(E) [s^{(a+)}_{j'k}(E)]^*.
double kinetic_energy_change(const SystemSpec& sys, const DensityMatrix& rho,
                             const GaussianPacket& pk, const PotentialProfile& pot,
                             double quad_tol = 1e-10);

// Narrow-energy prediction: only diagonal populations and transition
// probabilities at shifted energies. Requires the narrow regime unless
// overridden (override is recorded in the metadata).
EnergyDistribution narrow_limit_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, int threads = 0,
                                             bool regime_override = false);
EnergyDistribution narrow_limit_distribution(const SystemSpec& sys, const DensityMatrix& rho,
                                             const GaussianPacket& pk, const PotentialProfile& pot,
                                             const EnergyGrid& grid, const SMatrixTable& table,
                                             bool regime_override = false, int threads = 0);

// Convolution of a delta comb with the initial kinetic-energy distribution:
// rho'(E) = sum_g weight_g rho_X(E - W_g).
EnergyDistribution semiclassical_convolution(const tpm::DeltaComb& comb, const GaussianPacket& pk,
                                             const EnergyGrid& grid);

// Final-distribution formula with an energy-independent unitary in place of
// the scattering matrix, for an arbitrary Hermitian energy kernel.
EnergyDistribution final_distribution_from_unitary(
    const SystemSpec& sys, const DensityMatrix& rho,
    const std::function<Complex(double, double)>& energy_kernel, const core::Matrix& v_s,
    const EnergyGrid& grid);

} // namespace scatterwork::collision

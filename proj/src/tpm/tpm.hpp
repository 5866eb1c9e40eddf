// tpm.hpp — non-autonomous reference side: interaction-picture propagator for a
// time-dependent drive V(t) nu, two-point-measurement statistics and averages.

#pragma once

#include <functional>
#include <vector>

#include "core/system.hpp"

namespace scatterwork::tpm {

using core::Complex;
using core::DensityMatrix;
using core::Matrix;
using core::SystemSpec;

// V(t), non-vanishing only on (0, tau).
struct DriveProtocol {
    std::function<double(double)> shape;
    double tau = 0.0;
    // sorted interior times where the shape is discontinuous
    std::vector<double> breakpoints;
    // set when the drive is piecewise constant; enables the exact product path
    bool piecewise_constant = false;
    std::vector<std::pair<double, double>> segments;  // (duration, value)

    static DriveProtocol constant_pulse(double v0, double tau);
    static DriveProtocol piecewise(std::vector<std::pair<double, double>> segments);
    static DriveProtocol from_callable(std::function<double(double)> shape, double tau,
                                       std::vector<double> breakpoints = {});
    double operator()(double t) const;
};

// Delta-comb distribution over energy jumps W, atoms grouped by Bohr gap.
struct DeltaComb {
    struct Atom {
        double w = 0.0;       // location (negated Bohr gap)
        double weight = 0.0;  // probability
    };
    std::vector<Atom> atoms;  // ascending in w; weights sum to 1
};

enum class PropagationMethod { automatic, ode, closed_form };

struct PropagationResult {
    Matrix unitary;
    double unitarity_defect = 0.0;  // before any re-projection
    bool projected = false;
    long ode_steps = 0;
};

// Solves dU/dt = -(i/hbar) V(t) e^{iHt/hbar} nu e^{-iHt/hbar} U on (0, tau).
// Piecewise-constant drives use the exact interaction-picture product unless
// the ODE path is forced. Result is re-projected to the unitary group (and
// flagged) only when the defect exceeds 10*tol.
PropagationResult propagate_interaction_full(const SystemSpec& sys, const DriveProtocol& drive,
                                             double tol = 1e-10,
                                             PropagationMethod method = PropagationMethod::automatic);

Matrix propagate_interaction(const SystemSpec& sys, const DriveProtocol& drive,
                             double tol = 1e-10,
                             PropagationMethod method = PropagationMethod::automatic);

// P^TPM(W): atom at W = -(e_{j'} - e_j) with weight |<j'|U|j>|^2 <j|rho|j>.
DeltaComb tpm_distribution(const Matrix& u, const DensityMatrix& rho, const SystemSpec& sys);

// First moment of the comb, sum_atoms W * weight.
double tpm_average(const DeltaComb& dist);

// State after the non-selective scheme: diagonal populations sum_j |U_{j'j}|^2 rho_jj.
DensityMatrix post_tpm_state(const Matrix& u, const DensityMatrix& rho);

// Tr[H_S rho] - Tr[H_S U rho U^dagger].
double untouched_work(const Matrix& u, const DensityMatrix& rho, const SystemSpec& sys);

} // namespace scatterwork::tpm

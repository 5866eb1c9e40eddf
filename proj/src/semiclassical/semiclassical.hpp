// semiclassical.hpp — effective time-dependent drive induced by a fast
// particle traversing the potential, and the defect of the fixed-kinetic-energy
// approximation against the exact coupled-channel S-matrix.

#pragma once

#include "channels/channels.hpp"
#include "core/system.hpp"
#include "tpm/tpm.hpp"

namespace scatterwork::semiclassical {

using channels::PotentialProfile;
using core::Matrix;
using core::SystemSpec;

// V(t) = lambda(p(E_p) t / m) on (0, tau) with tau = m a / p(E_p).
struct EffectiveDrive {
    tpm::DriveProtocol drive;
    double kinetic_energy = 0.0;
    double speed = 0.0;
    double tau = 0.0;
};

EffectiveDrive effective_drive(const PotentialProfile& pot, double kinetic_energy, double mass);

// s(E_p): the interaction-picture propagator of the effective drive.
Matrix semiclassical_s(const SystemSpec& sys, const PotentialProfile& pot, double kinetic_energy,
                       double mass, double tol = 1e-10);

struct DefectReport {
    // max_{j'j} |s^{(++)}_{j'j}(E_p + e_{j'}) - <j'|s(E_p)|j>| after removing
    // one global phase
    double amplitude_defect = 0.0;
    // worst incoming channel's total reflected probability sum_{j'} |s^{(-+)}|^2
    double reflection_probability = 0.0;
    double alignment_phase = 0.0;  // radians applied to s(E_p)
    double combined() const { return amplitude_defect + reflection_probability; }
};

// Requires every channel open at the shifted energies E_p + e_{j'}.
DefectReport semiclassical_defect(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                                  double kinetic_energy);

} // namespace scatterwork::semiclassical

// packet.hpp — Gaussian momentum wave packets, their kinetic-energy-basis
// density-matrix elements, evaluation grids, and regime classification.

#pragma once

#include <string>
#include <vector>

#include "channels/channels.hpp"
#include "core/system.hpp"

namespace scatterwork::packet {

using core::Complex;
using core::SystemSpec;

class GaussianPacket {
public:
    // Right-moving minimum-uncertainty packet truncated to p > 0 and
    // renormalized. Requires p0 >= 5 sigma_p; flags marginal below 10 sigma_p.
    GaussianPacket(double p0, double sigma_p, double x0, double mass, double hbar = 1.0);

    double p0() const { return p0_; }
    double sigma_p() const { return sigma_p_; }
    double x0() const { return x0_; }
    double mass() const { return mass_; }
    double hbar() const { return hbar_; }
    double v0() const { return p0_ / mass_; }
    double sigma_x() const { return hbar_ / (2.0 * sigma_p_); }
    double sigma_e() const { return v0() * sigma_p_; }
    double mean_kinetic_energy() const { return p0_ * p0_ / (2.0 * mass_); }
    bool marginal_right_moving() const { return marginal_; }
    double momentum_of_energy(double e) const;  // p(E) = sqrt(2 m E), E > 0

    Complex momentum_amplitude(double p) const;           // phi(p), zero for p <= 0
    Complex energy_amplitude(double e) const;             // psi(E) = sqrt(m/p(E)) phi(p(E))
    Complex energy_dm_element(double e1, double e2) const;  // psi(E) psi*(E')

private:
    double p0_, sigma_p_, x0_, mass_, hbar_;
    double norm_;  // includes the p > 0 truncation renormalization
    bool marginal_ = false;
};

struct EnergyGrid {
    std::vector<double> points;  // strictly ascending, strictly positive
    double spacing = 0.0;

    std::size_t size() const { return points.size(); }
    double lo() const { return points.front(); }
    double hi() const { return points.back(); }

    // Uniform grid, points near 0 or near a shifted-channel threshold nudged
    // away by the guard.
    static EnergyGrid uniform(double lo, double hi, std::size_t n, const SystemSpec* sys = nullptr,
                              double threshold_guard = channels::kDefaultThresholdGuard);
    // [E_p0 - span*sigma_E - Delta_max, E_p0 + span*sigma_E + Delta_max]
    static EnergyGrid for_packet(const GaussianPacket& pk, const SystemSpec& sys,
                                 std::size_t n = 4001, double span_sigmas = 8.0);
};

enum class ConditionStatus { satisfied, marginal, violated };
enum class RegimeLabel { narrow, broad, intermediate, non_semiclassical };

struct RegimeReport {
    struct Condition {
        std::string name;
        double ratio = 0.0;
        ConditionStatus status = ConditionStatus::violated;
    };
    std::vector<Condition> conditions;
    RegimeLabel overall = RegimeLabel::intermediate;

    const Condition& find(const std::string& name) const;
};

std::string to_string(RegimeLabel label);
std::string to_string(ConditionStatus status);

// Dimensionless ratios for the narrow-energy, semiclassical, and broad-packet
// conditions; satisfied >= 10, marginal in [1, 10), violated < 1.
RegimeReport classify_regime(const GaussianPacket& pk, const SystemSpec& sys,
                             const channels::PotentialProfile& pot);

} // namespace scatterwork::packet

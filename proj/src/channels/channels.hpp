// channels.hpp — exact coupled-channel 1D scattering for a piecewise-constant
// potential nu * lambda(x), flux-normalized S-matrix with open/closed channels.

#pragma once

#include <complex>
#include <vector>

#include "core/system.hpp"

namespace scatterwork::channels {

using core::Complex;
using core::Matrix;
using core::SystemSpec;

inline constexpr double kDefaultThresholdGuard = 1e-9;  // energy units

// lambda(x): contiguous constant segments covering (0, a), zero outside.
struct PotentialProfile {
    struct Segment {
        double x_start = 0.0;
        double x_end = 0.0;
        double value = 0.0;
        double width() const { return x_end - x_start; }
    };
    std::vector<Segment> segments;

    static PotentialProfile barrier(double v0, double a);
    static PotentialProfile from_segments(std::vector<Segment> segments);
    // convenience: consecutive (width, value) pairs starting at x = 0
    static PotentialProfile from_widths(const std::vector<std::pair<double, double>>& parts);

    double total_width() const;                 // a
    double min_feature() const;                 // a_min
    double max_abs_value() const;
};

enum class Direction { plus = 0, minus = 1 };

struct ChannelMomentum {
    double k = 0.0;  // sqrt(2m(E - e_j))/hbar when open
    bool open = false;
};

// E - e_j within the guard of zero -> ThresholdProximity error.
std::vector<ChannelMomentum> channel_momenta(const SystemSpec& sys, double mass, double total_energy,
                                             double threshold_guard = kDefaultThresholdGuard);

// Flux-normalized scattering matrix at fixed total energy. Blocks are indexed
// s(alpha, j', beta, j); closed-channel entries follow the delta convention.
class ScatteringMatrix {
public:
    ScatteringMatrix(double total_energy, std::vector<ChannelMomentum> momenta,
                     Matrix spp, Matrix smp, Matrix spm, Matrix smm);

    double total_energy() const { return total_energy_; }
    int dim() const { return static_cast<int>(momenta_.size()); }
    bool open(int j) const { return momenta_[j].open; }
    double momentum(int j) const { return momenta_[j].k; }

    Complex s(Direction alpha, int jp, Direction beta, int j) const;
    const Matrix& transmission_lr() const { return spp_; }   // s^{(++)}
    const Matrix& reflection_left() const { return smp_; }   // s^{(-+)}
    const Matrix& reflection_right() const { return spm_; }  // s^{(+-)}
    const Matrix& transmission_rl() const { return smm_; }   // s^{(--)}

    // rows (alpha=+ then alpha=-) x cols (beta=+ then beta=-), full 2N x 2N
    // including the closed-channel delta convention.
    Matrix extended_matrix() const;
    // max |S^dagger S - I| over the open-channel block
    double unitarity_defect() const;

private:
    double total_energy_;
    std::vector<ChannelMomentum> momenta_;
    Matrix spp_, smp_, spm_, smm_;
};

// Solve the coupled-channel problem with per-interface scattering matrices
// composed by the Redheffer star product (bounded for evanescent modes).
ScatteringMatrix s_matrix(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                          double total_energy, double threshold_guard = kDefaultThresholdGuard);

// Analytic square-barrier amplitudes relative to free propagation (V0 = 0
// gives t = 1, r = 0); valid in tunneling, marginal, and over-barrier regimes.
struct BarrierAmplitudes {
    Complex t;
    Complex r;
};
BarrierAmplitudes single_channel_barrier(double kinetic_energy, double v0, double a,
                                         double mass, double hbar);

// P_{j'j}(E) = sum_alpha |s^{(alpha +)}_{j'j}(E)|^2; incoming channel must be open.
double transition_probability(const ScatteringMatrix& s, int j_from, int j_to);

} // namespace scatterwork::channels

#include "packet/packet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace scatterwork::packet {

GaussianPacket::GaussianPacket(double p0, double sigma_p, double x0, double mass, double hbar)
    : p0_(p0), sigma_p_(sigma_p), x0_(x0), mass_(mass), hbar_(hbar) {
    if (!(p0 > 0.0) || !(sigma_p > 0.0))
        throw ValidationError("packet requires p0 > 0 and sigma_p > 0");
    if (!(mass > 0.0) || !(hbar > 0.0))
        throw ValidationError("packet requires mass > 0 and hbar > 0");
    if (!(x0 < 0.0))
        throw ValidationError("packet mean position x0 must be left of the potential (x0 < 0)");
    if (p0 < 5.0 * sigma_p) {
        std::ostringstream msg;
        msg << "packet is not right-moving: p0 = " << p0 << " < 5 sigma_p = " << 5.0 * sigma_p;
        throw ValidationError(msg.str());
    }
    marginal_ = p0 < 10.0 * sigma_p;
    // mass of the p > 0 half of |phi|^2
    const double truncated_mass = 0.5 * std::erfc(-p0_ / (std::numbers::sqrt2 * sigma_p_));
    norm_ = std::pow(2.0 * std::numbers::pi * sigma_p_ * sigma_p_, -0.25) / std::sqrt(truncated_mass);
}

double GaussianPacket::momentum_of_energy(double e) const {
    if (!(e > 0.0)) throw DomainError("momentum_of_energy: kinetic energy must be positive");
    return std::sqrt(2.0 * mass_ * e);
}

Complex GaussianPacket::momentum_amplitude(double p) const {
    if (p <= 0.0) return {0.0, 0.0};
    const double d = (p - p0_) / (2.0 * sigma_p_);
    const double mag = norm_ * std::exp(-d * d);
    const double phase = -p * x0_ / hbar_;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

Complex GaussianPacket::energy_amplitude(double e) const {
    const double p = momentum_of_energy(e);
    return std::sqrt(mass_ / p) * momentum_amplitude(p);
}

Complex GaussianPacket::energy_dm_element(double e1, double e2) const {
    return energy_amplitude(e1) * std::conj(energy_amplitude(e2));
}

EnergyGrid EnergyGrid::uniform(double lo, double hi, std::size_t n, const SystemSpec* sys,
                               double threshold_guard) {
    if (n < 2) throw GridError("energy grid needs at least 2 points");
    if (!(hi > lo)) throw GridError("energy grid needs hi > lo");
    lo = std::max(lo, threshold_guard);
    const double spacing = (hi - lo) / static_cast<double>(n - 1);
    if (spacing < 10.0 * threshold_guard)
        throw GridError("energy grid spacing is below 10x the threshold guard");

    // kinetic energies E_p whose shifted total energies E_p + e_{j'} can sit on
    // a channel threshold e_j, i.e. the positive Bohr gaps, plus zero
    std::vector<double> bad{0.0};
    if (sys) {
        for (const auto& g : sys->gaps().gaps)
            if (g.delta > 0.0) bad.push_back(g.delta);
    }
    EnergyGrid grid;
    grid.spacing = spacing;
    grid.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double e = lo + spacing * static_cast<double>(i);
        for (double b : bad)
            if (std::abs(e - b) < threshold_guard) e = b + 2.0 * threshold_guard;
        grid.points[i] = e;
    }
    for (std::size_t i = 0; i + 1 < grid.points.size(); ++i)
        if (!(grid.points[i] < grid.points[i + 1]))
            throw GridError("energy grid is not strictly ascending after threshold nudging");
    return grid;
}

EnergyGrid EnergyGrid::for_packet(const GaussianPacket& pk, const SystemSpec& sys,
                                  std::size_t n, double span_sigmas) {
    const double half = span_sigmas * pk.sigma_e() + sys.gaps().max_gap();
    const double center = pk.mean_kinetic_energy();
    return uniform(center - half, center + half, n, &sys);
}

const RegimeReport::Condition& RegimeReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw InvalidArgumentError("regime report has no condition named " + name);
}

std::string to_string(RegimeLabel label) {
    switch (label) {
        case RegimeLabel::narrow: return "narrow";
        case RegimeLabel::broad: return "broad";
        case RegimeLabel::intermediate: return "intermediate";
        case RegimeLabel::non_semiclassical: return "non_semiclassical";
    }
    return "unknown";
}

std::string to_string(ConditionStatus status) {
    switch (status) {
        case ConditionStatus::satisfied: return "satisfied";
        case ConditionStatus::marginal: return "marginal";
        case ConditionStatus::violated: return "violated";
    }
    return "unknown";
}

namespace {

ConditionStatus status_of(double ratio) {
    if (ratio >= 10.0) return ConditionStatus::satisfied;
    if (ratio >= 1.0) return ConditionStatus::marginal;
    return ConditionStatus::violated;
}

} // namespace

RegimeReport classify_regime(const GaussianPacket& pk, const SystemSpec& sys,
                             const channels::PotentialProfile& pot) {
    const double inf = std::numeric_limits<double>::infinity();
    const double v0 = pk.v0();
    const double ep0 = pk.mean_kinetic_energy();
    const auto gap_values = sys.gaps().values_with_zero();
    const double max_gap = sys.gaps().max_gap();

    double min_pair = inf, max_pair = 0.0;
    for (std::size_t i = 0; i < gap_values.size(); ++i)
        for (std::size_t j = i + 1; j < gap_values.size(); ++j) {
            const double d = std::abs(gap_values[i] - gap_values[j]);
            min_pair = std::min(min_pair, d);
            max_pair = std::max(max_pair, d);
        }

    const double nu_norm = core::diagonalize_hermitian(sys.coupling())
                               .values.cwiseAbs().maxCoeff();
    const double pot_scale = pot.max_abs_value() * nu_norm;
    const double tau = pot.total_width() / v0;

    RegimeReport report;
    auto add = [&](const std::string& name, double ratio) {
        report.conditions.push_back({name, ratio, status_of(ratio)});
        return ratio;
    };

    add("right_moving", pk.p0() / pk.sigma_p());
    const double narrow = add("narrow_energy",
                              gap_values.size() < 2 ? inf : min_pair / (v0 * pk.sigma_p()));
    const double sc_pot = add("semiclassical_potential", pot_scale == 0.0 ? inf : ep0 / pot_scale);
    const double sc_act = add("semiclassical_action", pk.p0() * pot.min_feature() / pk.hbar());
    const double sc_gap = add("semiclassical_gap", max_gap == 0.0 ? inf : ep0 / max_gap);
    const double broad_e = add("broad_energy",
                               max_pair == 0.0 ? inf : (pk.hbar() / (2.0 * pk.sigma_x())) * v0 / max_pair);
    const double broad_t = add("broad_time", max_gap == 0.0 ? inf : (pk.hbar() / max_gap) / tau);

    const double sc_min = std::min({sc_pot, sc_act, sc_gap});
    if (sc_min < 1.0) {
        report.overall = RegimeLabel::non_semiclassical;
    } else if (narrow >= 10.0) {
        report.overall = RegimeLabel::narrow;
    } else if (std::min(broad_e, broad_t) >= 10.0) {
        report.overall = RegimeLabel::broad;
    } else {
        report.overall = RegimeLabel::intermediate;
    }
    return report;
}

} // namespace scatterwork::packet

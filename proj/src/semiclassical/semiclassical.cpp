#include "semiclassical/semiclassical.hpp"

#include <cmath>
#include <complex>

namespace scatterwork::semiclassical {

using core::Complex;

EffectiveDrive effective_drive(const PotentialProfile& pot, double kinetic_energy, double mass) {
    if (!(kinetic_energy > 0.0))
        throw DomainError("effective_drive: kinetic energy must be positive");
    if (!(mass > 0.0)) throw InvalidArgumentError("effective_drive: mass must be positive");
    const double p = std::sqrt(2.0 * mass * kinetic_energy);
    const double v = p / mass;
    EffectiveDrive out;
    out.kinetic_energy = kinetic_energy;
    out.speed = v;
    out.tau = pot.total_width() / v;
    std::vector<std::pair<double, double>> segments;
    segments.reserve(pot.segments.size());
    for (const auto& seg : pot.segments) segments.emplace_back(seg.width() / v, seg.value);
    out.drive = tpm::DriveProtocol::piecewise(std::move(segments));
    return out;
}

Matrix semiclassical_s(const SystemSpec& sys, const PotentialProfile& pot, double kinetic_energy,
                       double mass, double tol) {
    const EffectiveDrive eff = effective_drive(pot, kinetic_energy, mass);
    return tpm::propagate_interaction(sys, eff.drive, tol);
}

DefectReport semiclassical_defect(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                                  double kinetic_energy) {
    const int n = sys.dim();
    Matrix exact(n, n);
    DefectReport report;
    std::vector<channels::ScatteringMatrix> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int jp = 0; jp < n; ++jp) {
        const double e_total = kinetic_energy + sys.energy(jp);
        channels::ScatteringMatrix s = channels::s_matrix(sys, pot, mass, e_total);
        for (int j = 0; j < n; ++j)
            if (!s.open(j))
                throw DomainError("semiclassical_defect: channel " + std::to_string(j) +
                                  " is closed at shifted energy " + std::to_string(e_total) +
                                  "; the comparison is undefined");
        exact.row(jp) = s.transmission_lr().row(jp);
        rows.push_back(std::move(s));
    }
    for (int j = 0; j < n; ++j) {
        double refl = 0.0;
        for (int jp = 0; jp < n; ++jp)
            refl += std::norm(rows[static_cast<std::size_t>(jp)].reflection_left()(jp, j));
        report.reflection_probability = std::max(report.reflection_probability, refl);
    }

    const Matrix semi = semiclassical_s(sys, pot, kinetic_energy, mass);
    // align one global phase: the equivalence holds up to the free-flight convention
    const Complex z = (semi.adjoint() * exact).trace();
    const Complex phase = std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0, 0.0);
    report.alignment_phase = std::arg(phase);
    report.amplitude_defect = (exact - phase * semi).cwiseAbs().maxCoeff();
    return report;
}

} // namespace scatterwork::semiclassical

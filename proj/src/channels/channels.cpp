#include "channels/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatterwork::channels {

PotentialProfile PotentialProfile::barrier(double v0, double a) {
    return from_segments({{0.0, a, v0}});
}

PotentialProfile PotentialProfile::from_segments(std::vector<Segment> segments) {
    if (segments.empty()) throw ValidationError("potential needs at least one segment");
    PotentialProfile p;
    p.segments = std::move(segments);
    if (std::abs(p.segments.front().x_start) > 1e-15)
        throw ValidationError("potential segments must start at x = 0");
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
        if (!(p.segments[i].width() > 0.0))
            throw ValidationError("potential segment " + std::to_string(i) + " has non-positive width");
        if (i > 0 && std::abs(p.segments[i].x_start - p.segments[i - 1].x_end) > 1e-12)
            throw ValidationError("potential segments must be contiguous");
    }
    return p;
}

PotentialProfile PotentialProfile::from_widths(const std::vector<std::pair<double, double>>& parts) {
    std::vector<Segment> segs;
    double x = 0.0;
    for (const auto& [w, v] : parts) {
        segs.push_back({x, x + w, v});
        x += w;
    }
    return from_segments(std::move(segs));
}

double PotentialProfile::total_width() const { return segments.back().x_end; }

double PotentialProfile::min_feature() const {
    double m = segments.front().width();
    for (const auto& s : segments) m = std::min(m, s.width());
    return m;
}

double PotentialProfile::max_abs_value() const {
    double m = 0.0;
    for (const auto& s : segments) m = std::max(m, std::abs(s.value));
    return m;
}

std::vector<ChannelMomentum> channel_momenta(const SystemSpec& sys, double mass,
                                             double total_energy, double threshold_guard) {
    if (!(mass > 0.0)) throw InvalidArgumentError("channel_momenta: mass must be positive");
    const int n = sys.dim();
    std::vector<ChannelMomentum> out(n);
    for (int j = 0; j < n; ++j) {
        const double gap = total_energy - sys.energy(j);
        if (std::abs(gap) < threshold_guard) {
            std::ostringstream msg;
            msg << "total energy " << total_energy << " is within " << threshold_guard
                << " of channel threshold e_" << j << " = " << sys.energy(j);
            throw ThresholdProximityError(msg.str());
        }
        if (gap > 0.0) out[j] = {std::sqrt(2.0 * mass * gap) / sys.hbar(), true};
    }
    return out;
}

ScatteringMatrix::ScatteringMatrix(double total_energy, std::vector<ChannelMomentum> momenta,
                                   Matrix spp, Matrix smp, Matrix spm, Matrix smm)
    : total_energy_(total_energy), momenta_(std::move(momenta)),
      spp_(std::move(spp)), smp_(std::move(smp)), spm_(std::move(spm)), smm_(std::move(smm)) {}

Complex ScatteringMatrix::s(Direction alpha, int jp, Direction beta, int j) const {
    if (alpha == Direction::plus)
        return beta == Direction::plus ? spp_(jp, j) : spm_(jp, j);
    return beta == Direction::plus ? smp_(jp, j) : smm_(jp, j);
}

Matrix ScatteringMatrix::extended_matrix() const {
    const int n = dim();
    Matrix full(2 * n, 2 * n);
    full.block(0, 0, n, n) = spp_;
    full.block(0, n, n, n) = spm_;
    full.block(n, 0, n, n) = smp_;
    full.block(n, n, n, n) = smm_;
    return full;
}

double ScatteringMatrix::unitarity_defect() const {
    const int n = dim();
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
        if (momenta_[j].open) idx.push_back(j);
    const int no = static_cast<int>(idx.size());
    if (no == 0) return 0.0;
    Matrix s(2 * no, 2 * no);
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) {
            s(a, b) = spp_(idx[a], idx[b]);
            s(a, b + no) = spm_(idx[a], idx[b]);
            s(a + no, b) = smp_(idx[a], idx[b]);
            s(a + no, b + no) = smm_(idx[a], idx[b]);
        }
    return core::unitarity_defect(s);
}

BarrierAmplitudes single_channel_barrier(double kinetic_energy, double v0, double a,
                                         double mass, double hbar) {
    if (!(kinetic_energy > 0.0))
        throw DomainError("single_channel_barrier: kinetic energy must be positive");
    if (!(mass > 0.0) || !(a > 0.0) || !(hbar > 0.0))
        throw InvalidArgumentError("single_channel_barrier: mass, width, hbar must be positive");
    const double k = std::sqrt(2.0 * mass * kinetic_energy) / hbar;
    const Complex kp = std::sqrt(Complex(2.0 * mass * (kinetic_energy - v0), 0.0)) / hbar;
    const Complex z = kp * a;
    // sin(z)/z stays finite through the marginal point k' = 0
    Complex sinc;
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        sinc = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    } else {
        sinc = std::sin(z) / z;
    }
    const Complex cosz = std::cos(z);
    const Complex i(0.0, 1.0);
    const Complex den = cosz - 0.5 * i * (k * k + kp * kp) * a * sinc / k;
    const Complex t = std::exp(-i * k * a) / den;
    const Complex r = t * std::exp(i * k * a) * 0.5 * i * ((kp * kp - k * k) / k) * a * sinc;
    return {t, r};
}

namespace {

using Eigen::VectorXcd;

struct Region {
    Matrix modes;     // columns: interior eigenvectors (identity outside)
    VectorXcd q;      // wavenumbers, Im q >= 0 for evanescent modes
    double width;     // 0 for the exterior half-lines
};

struct BlockS {
    Matrix s11, s12, s21, s22;
};

VectorXcd wavenumbers(const Eigen::VectorXd& levels, double total_energy, double mass,
                      double hbar, double threshold_guard, bool interior) {
    const int n = static_cast<int>(levels.size());
    VectorXcd q(n);
    for (int j = 0; j < n; ++j) {
        const double gap = total_energy - levels(j);
        if (interior && std::abs(gap) < threshold_guard) {
            std::ostringstream msg;
            msg << "total energy " << total_energy << " is within " << threshold_guard
                << " of interior mode energy " << levels(j);
            throw ThresholdProximityError(msg.str());
        }
        q(j) = std::sqrt(Complex(2.0 * mass * gap, 0.0)) / hbar;  // principal branch, Im >= 0
    }
    return q;
}

// Scattering matrix of the interface between two uniform regions, from
// continuity of psi and psi'.
BlockS interface_s(const Region& left, const Region& right) {
    const int n = static_cast<int>(left.q.size());
    const Matrix aql = left.modes * left.q.asDiagonal();
    const Matrix bqr = right.modes * right.q.asDiagonal();
    Matrix m(2 * n, 2 * n), rhs(2 * n, 2 * n);
    m.block(0, 0, n, n) = left.modes;
    m.block(0, n, n, n) = -right.modes;
    m.block(n, 0, n, n) = aql;
    m.block(n, n, n, n) = bqr;
    rhs.block(0, 0, n, n) = -left.modes;
    rhs.block(0, n, n, n) = right.modes;
    rhs.block(n, 0, n, n) = aql;
    rhs.block(n, n, n, n) = bqr;
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << "interface matching is numerically singular (rcond estimate " << rcond << ")";
        throw SingularMatchingError(msg.str());
    }
    const Matrix s = lu.solve(rhs);
    return {s.block(0, 0, n, n), s.block(0, n, n, n),
            s.block(n, 0, n, n), s.block(n, n, n, n)};
}

BlockS propagation_s(const Region& r) {
    const int n = static_cast<int>(r.q.size());
    VectorXcd ph(n);
    for (int j = 0; j < n; ++j) ph(j) = std::exp(Complex(0.0, 1.0) * r.q(j) * r.width);
    BlockS s;
    s.s11 = Matrix::Zero(n, n);
    s.s22 = Matrix::Zero(n, n);
    s.s12 = ph.asDiagonal();
    s.s21 = ph.asDiagonal();
    return s;
}

Matrix stable_solve(const Matrix& m, const Matrix& rhs) {
    Eigen::PartialPivLU<Matrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
        std::ostringstream msg;
        msg << "star-product composition is numerically singular (rcond estimate " << rcond << ")";
        throw SingularMatchingError(msg.str());
    }
    return lu.solve(rhs);
}

// Redheffer star product: compose S_a (left) with S_b (right).
BlockS star(const BlockS& a, const BlockS& b) {
    const int n = static_cast<int>(a.s11.rows());
    const Matrix id = Matrix::Identity(n, n);
    const Matrix e = a.s12 * stable_solve(id - b.s11 * a.s22, id);
    const Matrix f = b.s21 * stable_solve(id - a.s22 * b.s11, id);
    BlockS c;
    c.s11 = a.s11 + e * b.s11 * a.s21;
    c.s12 = e * b.s12;
    c.s21 = f * a.s21;
    c.s22 = b.s22 + f * a.s22 * b.s12;
    return c;
}

} // namespace

ScatteringMatrix s_matrix(const SystemSpec& sys, const PotentialProfile& pot, double mass,
                          double total_energy, double threshold_guard) {
    const int n = sys.dim();
    const auto momenta = channel_momenta(sys, mass, total_energy, threshold_guard);
    bool any_open = false;
    for (const auto& m : momenta) any_open |= m.open;
    if (!any_open)
        throw DomainError("s_matrix: no open channel at total energy " + std::to_string(total_energy));

    const Matrix hs = sys.hamiltonian();
    Region exterior{Matrix::Identity(n, n),
                    wavenumbers(sys.energies(), total_energy, mass, sys.hbar(), threshold_guard, false),
                    0.0};

    std::vector<Region> regions;
    regions.push_back(exterior);
    for (const auto& seg : pot.segments) {
        const core::Eigensystem es = core::diagonalize_hermitian(hs + seg.value * sys.coupling());
        regions.push_back({es.vectors,
                           wavenumbers(es.values, total_energy, mass, sys.hbar(), threshold_guard, true),
                           seg.width()});
    }
    regions.push_back(exterior);

    BlockS total;
    bool first = true;
    for (std::size_t i = 0; i + 1 < regions.size(); ++i) {
        const BlockS iface = interface_s(regions[i], regions[i + 1]);
        total = first ? iface : star(total, iface);
        first = false;
        if (i + 2 < regions.size())
            total = star(total, propagation_s(regions[i + 1]));
    }

    // flux normalization and removal of the free-flight phase across (0, a)
    const double a = pot.total_width();
    Eigen::VectorXd sqrt_k(n);
    VectorXcd phase(n);
    for (int j = 0; j < n; ++j) {
        sqrt_k(j) = momenta[j].open ? std::sqrt(momenta[j].k) : 1.0;
        phase(j) = momenta[j].open ? std::exp(Complex(0.0, -momenta[j].k * a)) : Complex(1.0, 0.0);
    }
    auto flux = [&](const Matrix& raw) {
        Matrix out = raw;
        for (int jp = 0; jp < n; ++jp)
            for (int j = 0; j < n; ++j) out(jp, j) *= sqrt_k(jp) / sqrt_k(j);
        return out;
    };
    Matrix spp = flux(phase.asDiagonal() * total.s21);
    Matrix smp = flux(total.s11);
    Matrix smm = flux(total.s12 * phase.asDiagonal());
    Matrix spm = flux(phase.asDiagonal() * total.s22 * phase.asDiagonal());

    // closed channels follow the delta_{j'j} delta_{alpha beta} convention
    for (int jp = 0; jp < n; ++jp)
        for (int j = 0; j < n; ++j) {
            if (momenta[jp].open && momenta[j].open) continue;
            const Complex diag = (jp == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            spp(jp, j) = diag;
            smm(jp, j) = diag;
            smp(jp, j) = Complex(0.0, 0.0);
            spm(jp, j) = Complex(0.0, 0.0);
        }

    return ScatteringMatrix(total_energy, momenta, std::move(spp), std::move(smp),
                            std::move(spm), std::move(smm));
}

double transition_probability(const ScatteringMatrix& s, int j_from, int j_to) {
    if (j_from < 0 || j_from >= s.dim() || j_to < 0 || j_to >= s.dim())
        throw InvalidArgumentError("transition_probability: channel index out of range");
    if (!s.open(j_from))
        throw DomainError("transition_probability: incoming channel " + std::to_string(j_from) +
                          " is closed at total energy " + std::to_string(s.total_energy()));
    return std::norm(s.s(Direction::plus, j_to, Direction::plus, j_from)) +
           std::norm(s.s(Direction::minus, j_to, Direction::plus, j_from));
}

} // namespace scatterwork::channels

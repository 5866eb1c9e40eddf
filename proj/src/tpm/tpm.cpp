#include "tpm/tpm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatterwork::tpm {

DriveProtocol DriveProtocol::constant_pulse(double v0, double tau) {
    return piecewise({{tau, v0}});
}

DriveProtocol DriveProtocol::piecewise(std::vector<std::pair<double, double>> segments) {
    if (segments.empty()) throw InvalidArgumentError("drive needs at least one segment");
    DriveProtocol d;
    d.segments = std::move(segments);
    d.piecewise_constant = true;
    double t = 0.0;
    for (const auto& [w, v] : d.segments) {
        if (!(w > 0.0)) throw InvalidArgumentError("drive segment durations must be positive");
        t += w;
        d.breakpoints.push_back(t);
    }
    d.tau = t;
    d.breakpoints.pop_back();  // tau itself is the endpoint, not interior
    auto segs = d.segments;
    d.shape = [segs](double tt) {
        double acc = 0.0;
        for (const auto& [w, v] : segs) {
            if (tt >= acc && tt < acc + w) return v;
            acc += w;
        }
        return 0.0;
    };
    return d;
}

DriveProtocol DriveProtocol::from_callable(std::function<double(double)> shape, double tau,
                                           std::vector<double> breakpoints) {
    if (!(tau > 0.0)) throw InvalidArgumentError("drive duration tau must be positive");
    DriveProtocol d;
    d.shape = std::move(shape);
    d.tau = tau;
    d.breakpoints = std::move(breakpoints);
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
    return d;
}

double DriveProtocol::operator()(double t) const {
    if (t <= 0.0 || t >= tau) return 0.0;
    return shape ? shape(t) : 0.0;
}

namespace {

// Dormand-Prince 5(4) with elementwise error control on the complex matrix.
struct DormandPrince {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    template <typename Rhs>
    static void step(const Rhs& rhs, double t, double h, const Matrix& y,
                     Matrix& y5, Matrix& err) {
        const Matrix k1 = rhs(t, y);
        const Matrix k2 = rhs(t + c2 * h, y + h * (1.0 / 5) * k1);
        const Matrix k3 = rhs(t + c3 * h, y + h * ((3.0 / 40) * k1 + (9.0 / 40) * k2));
        const Matrix k4 = rhs(t + c4 * h, y + h * ((44.0 / 45) * k1 - (56.0 / 15) * k2 + (32.0 / 9) * k3));
        const Matrix k5 = rhs(t + c5 * h, y + h * ((19372.0 / 6561) * k1 - (25360.0 / 2187) * k2 +
                                                   (64448.0 / 6561) * k3 - (212.0 / 729) * k4));
        const Matrix k6 = rhs(t + h, y + h * ((9017.0 / 3168) * k1 - (355.0 / 33) * k2 +
                                              (46732.0 / 5247) * k3 + (49.0 / 176) * k4 -
                                              (5103.0 / 18656) * k5));
        y5 = y + h * ((35.0 / 384) * k1 + (500.0 / 1113) * k3 + (125.0 / 192) * k4 -
                      (2187.0 / 6784) * k5 + (11.0 / 84) * k6);
        const Matrix k7 = rhs(t + h, y5);
        const Matrix y4 = y + h * ((5179.0 / 57600) * k1 + (7571.0 / 16695) * k3 +
                                   (393.0 / 640) * k4 - (92097.0 / 339200) * k5 +
                                   (187.0 / 2100) * k6 + (1.0 / 40) * k7);
        err = y5 - y4;
    }
};

Matrix closed_form_product(const SystemSpec& sys, const DriveProtocol& drive) {
    const int n = sys.dim();
    const Matrix hs = sys.hamiltonian();
    Matrix u_full = Matrix::Identity(n, n);
    for (const auto& [w, v] : drive.segments) {
        const Matrix gen = hs + v * sys.coupling();
        u_full = (core::unitary_exp(gen, w, sys.hbar()) * u_full).eval();
    }
    // back to the interaction picture at t = tau
    return core::unitary_exp(hs, -drive.tau, sys.hbar()) * u_full;
}

Matrix ode_propagate(const SystemSpec& sys, const DriveProtocol& drive, double tol,
                     long& steps_out) {
    const int n = sys.dim();
    const double hbar = sys.hbar();
    const Matrix hs = sys.hamiltonian();
    const auto rhs = [&](double t, const Matrix& u) -> Matrix {
        const double v = drive(t);
        if (v == 0.0) return Matrix::Zero(n, n);
        Eigen::VectorXcd ph(n);
        for (int j = 0; j < n; ++j)
            ph(j) = std::exp(Complex(0.0, sys.energy(j) * t / hbar));
        const Matrix v_i = v * (ph.asDiagonal() * sys.coupling() * ph.conjugate().asDiagonal());
        return Complex(0.0, -1.0 / hbar) * (v_i * u);
    };

    std::vector<double> stops = drive.breakpoints;
    stops.push_back(drive.tau);

    Matrix u = Matrix::Identity(n, n);
    double t = 0.0;
    double h = drive.tau / 100.0;
    long steps = 0;
    const long step_budget = 2'000'000;
    Matrix y5, err;
    double seg_lo = 0.0;
    for (double stop : stops) {
        // evaluate the shape by its interior limits so endpoint and breakpoint
        // discontinuities do not poison the embedded error estimate
        const double eval_lo = seg_lo + 1e-12 * drive.tau;
        const double eval_hi = stop - 1e-12 * drive.tau;
        const auto rhs_seg = [&](double tt, const Matrix& m) {
            return rhs(std::clamp(tt, eval_lo, eval_hi), m);
        };
        while (stop - t > 1e-14 * drive.tau) {
            const bool final_step = h >= stop - t;
            const double h_try = final_step ? stop - t : h;
            DormandPrince::step(rhs_seg, t, h_try, u, y5, err);
            ++steps;
            if (steps > step_budget) {
                std::ostringstream msg;
                msg << "propagator exceeded step budget (" << step_budget
                    << ") at t = " << t << " with step " << h_try << " and tol " << tol;
                throw NumericalError(msg.str());
            }
            // error-per-unit-step control so the accumulated error tracks tol
            const double scale = tol * (1.0 + u.cwiseAbs().maxCoeff()) * (h_try / drive.tau);
            const double e = err.cwiseAbs().maxCoeff();
            if (e <= scale) {
                t = final_step ? stop : t + h_try;
                u = y5;
            }
            double factor = 0.9 * std::pow(scale / std::max(e, 1e-300), 0.25);
            factor = std::clamp(factor, 0.2, 5.0);
            h = h_try * factor;
            if (h < 1e-13 * drive.tau)
                throw NumericalError("propagator step size underflow; drive may be too stiff");
        }
        t = stop;
        seg_lo = stop;
    }
    steps_out = steps;
    return u;
}

Matrix polar_projection(const Matrix& u) {
    Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

} // namespace

PropagationResult propagate_interaction_full(const SystemSpec& sys, const DriveProtocol& drive,
                                             double tol, PropagationMethod method) {
    if (!(tol > 0.0)) throw InvalidArgumentError("propagator tolerance must be positive");
    PropagationResult res;
    const bool use_closed = method == PropagationMethod::closed_form ||
                            (method == PropagationMethod::automatic && drive.piecewise_constant);
    if (use_closed) {
        if (!drive.piecewise_constant)
            throw InvalidArgumentError("closed-form propagation needs a piecewise-constant drive");
        res.unitary = closed_form_product(sys, drive);
    } else {
        res.unitary = ode_propagate(sys, drive, tol, res.ode_steps);
    }
    res.unitarity_defect = core::unitarity_defect(res.unitary);
    if (res.unitarity_defect > 1e-3)
        throw NumericalError("propagator produced a grossly non-unitary result (defect " +
                             std::to_string(res.unitarity_defect) + ")");
    if (res.unitarity_defect > 10.0 * tol) {
        res.unitary = polar_projection(res.unitary);
        res.projected = true;
    }
    return res;
}

Matrix propagate_interaction(const SystemSpec& sys, const DriveProtocol& drive, double tol,
                             PropagationMethod method) {
    return propagate_interaction_full(sys, drive, tol, method).unitary;
}

DeltaComb tpm_distribution(const Matrix& u, const DensityMatrix& rho, const SystemSpec& sys) {
    const int n = sys.dim();
    if (u.rows() != n || u.cols() != n || rho.dim() != n)
        throw InvalidArgumentError("tpm_distribution: dimension mismatch");
    const double defect = core::unitarity_defect(u);
    if (defect > 1e-8) {
        std::ostringstream msg;
        msg << "tpm_distribution: U is not unitary (defect " << defect << ")";
        throw ValidationError(msg.str());
    }

    const auto& table = sys.gaps();
    DeltaComb comb;
    // diagonal pairs live in the zero atom along with any gap group at ~0
    double zero_weight = 0.0;
    for (int j = 0; j < n; ++j)
        zero_weight += std::norm(u(j, j)) * rho.population(j);
    std::vector<DeltaComb::Atom> atoms;
    for (const auto& grp : table.distinct) {
        double w = 0.0;
        for (const auto& [jp, j] : grp.pairs)
            w += std::norm(u(jp, j)) * rho.population(j);
        if (std::abs(grp.value) <= table.tol) {
            zero_weight += w;
        } else {
            atoms.push_back({-grp.value, w});
        }
    }
    atoms.push_back({0.0, zero_weight});
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.w < b.w; });
    comb.atoms = std::move(atoms);
    double total = 0.0;
    for (const auto& a : comb.atoms) total += a.weight;
    if (std::abs(total - 1.0) > 1e-6)
        throw NumericalError("TPM comb weights sum to " + std::to_string(total));
    // absorb the O(unitarity defect) rounding so the comb is exactly normalized
    for (auto& a : comb.atoms) a.weight /= total;
    return comb;
}

double tpm_average(const DeltaComb& dist) {
    double avg = 0.0;
    for (const auto& a : dist.atoms) avg += a.w * a.weight;
    return avg;
}

DensityMatrix post_tpm_state(const Matrix& u, const DensityMatrix& rho) {
    const int n = rho.dim();
    if (u.rows() != n || u.cols() != n)
        throw InvalidArgumentError("post_tpm_state: dimension mismatch");
    Matrix out = Matrix::Zero(n, n);
    for (int jp = 0; jp < n; ++jp) {
        double p = 0.0;
        for (int j = 0; j < n; ++j) p += std::norm(u(jp, j)) * rho.population(j);
        out(jp, jp) = p;
    }
    return DensityMatrix(std::move(out));
}

double untouched_work(const Matrix& u, const DensityMatrix& rho, const SystemSpec& sys) {
    const Matrix hs = sys.hamiltonian();
    const Matrix evolved = u * rho.mat() * u.adjoint();
    return (hs * rho.mat()).trace().real() - (hs * evolved).trace().real();
}

} // namespace scatterwork::tpm

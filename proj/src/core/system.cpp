#include "core/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatterwork::core {

double hermiticity_defect(const Matrix& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double unitarity_defect(const Matrix& u) {
    const Matrix id = Matrix::Identity(u.rows(), u.cols());
    return (u.adjoint() * u - id).cwiseAbs().maxCoeff();
}

double BohrGapTable::max_gap() const {
    double m = 0.0;
    for (const auto& g : gaps) m = std::max(m, std::abs(g.delta));
    return m;
}

std::vector<double> BohrGapTable::values_with_zero() const {
    std::vector<double> vals{0.0};
    for (const auto& g : distinct)
        if (std::abs(g.value) > tol) vals.push_back(g.value);
    std::sort(vals.begin(), vals.end());
    return vals;
}

namespace {

BohrGapTable build_gap_table(const Vector& energies, double tol) {
    BohrGapTable table;
    table.tol = tol;
    const int n = static_cast<int>(energies.size());
    for (int jp = 0; jp < n; ++jp)
        for (int j = 0; j < n; ++j)
            if (jp != j) table.gaps.push_back({jp, j, energies(jp) - energies(j)});
    for (const auto& g : table.gaps) {
        auto it = std::find_if(table.distinct.begin(), table.distinct.end(),
                               [&](const BohrGapTable::Group& grp) {
                                   return std::abs(grp.value - g.delta) <= tol;
                               });
        if (it == table.distinct.end()) {
            table.distinct.push_back({g.delta, {{g.to, g.from}}});
        } else {
            it->pairs.emplace_back(g.to, g.from);
        }
    }
    std::sort(table.distinct.begin(), table.distinct.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    return table;
}

} // namespace

SystemSpec::SystemSpec(Vector energies, Matrix coupling, double hbar, double gap_tol)
    : energies_(std::move(energies)), coupling_(std::move(coupling)), hbar_(hbar) {
    const int n = static_cast<int>(energies_.size());
    if (n < 1 || n > kMaxDim)
        throw ValidationError("system dimension must be in [1, 16], got " + std::to_string(n));
    if (coupling_.rows() != n || coupling_.cols() != n)
        throw ValidationError("coupling matrix shape does not match the energy count");
    if (!(hbar_ > 0.0))
        throw ValidationError("hbar must be positive");
    for (int j = 0; j + 1 < n; ++j)
        if (!(energies_(j) < energies_(j + 1)))
            throw ValidationError("energies must be strictly ascending (non-degenerate spectrum)");
    const double defect = hermiticity_defect(coupling_);
    if (defect > kHermitianTol) {
        std::ostringstream msg;
        msg << "coupling operator is not Hermitian: max asymmetry " << defect;
        throw ValidationError(msg.str());
    }
    coupling_ = ((coupling_ + coupling_.adjoint()) / 2.0).eval();
    gaps_ = build_gap_table(energies_, gap_tol);
}

DensityMatrix::DensityMatrix(Matrix mat) : mat_(std::move(mat)) {
    if (mat_.rows() != mat_.cols() || mat_.rows() < 1)
        throw ValidationError("density matrix must be square and non-empty");
    const double hd = hermiticity_defect(mat_);
    if (hd > kHermitianTol) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian: max asymmetry " << hd;
        throw ValidationError(msg.str());
    }
    mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval();
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > 1e3 * kTraceTol) {
        std::ostringstream msg;
        msg << "density matrix trace is " << tr << ", expected 1";
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(mat_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalue check of density matrix failed");
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -kEigenvalueTol) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << min_eig;
        throw ValidationError(msg.str());
    }
}

DensityMatrix DensityMatrix::diagonal_truncation() const {
    Matrix d = Matrix::Zero(mat_.rows(), mat_.cols());
    d.diagonal() = mat_.diagonal();
    return DensityMatrix(std::move(d));
}

Eigensystem diagonalize_hermitian(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw InvalidArgumentError("diagonalize_hermitian: matrix must be square");
    const double defect = hermiticity_defect(m);
    if (defect > 1e-10) {
        std::ostringstream msg;
        msg << "diagonalize_hermitian: input is not Hermitian, max asymmetry " << defect;
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw NumericalError("Hermitian eigendecomposition failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix unitary_exp(const Matrix& m, double scale, double hbar) {
    if (!(hbar > 0.0)) throw InvalidArgumentError("unitary_exp: hbar must be positive");
    const Eigensystem es = diagonalize_hermitian(m);
    const int n = static_cast<int>(m.rows());
    Eigen::VectorXcd phases(n);
    for (int j = 0; j < n; ++j)
        phases(j) = std::exp(Complex(0.0, -es.values(j) * scale / hbar));
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

DensityMatrix thermal_state(const SystemSpec& sys, double beta) {
    if (!std::isfinite(beta)) throw InvalidArgumentError("thermal_state: beta must be finite");
    const int n = sys.dim();
    // subtract the ground energy so large beta cannot underflow everything
    Eigen::VectorXd w(n);
    for (int j = 0; j < n; ++j) w(j) = std::exp(-beta * (sys.energy(j) - sys.energy(0)));
    w /= w.sum();
    Matrix rho = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) rho(j, j) = w(j);
    return DensityMatrix(std::move(rho));
}

DensityMatrix coherent_thermal_state(const SystemSpec& sys, double beta) {
    const DensityMatrix th = thermal_state(sys, beta);
    const int n = sys.dim();
    Eigen::VectorXcd psi(n);
    for (int j = 0; j < n; ++j) psi(j) = std::sqrt(th.population(j));
    Matrix rho = psi * psi.adjoint();
    // pin the diagonal to the thermal populations exactly
    for (int j = 0; j < n; ++j) rho(j, j) = th.population(j);
    return DensityMatrix(std::move(rho));
}

} // namespace scatterwork::core

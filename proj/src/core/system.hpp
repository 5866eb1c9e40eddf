// system.hpp — finite quantum system description, Bohr gaps, density matrices,
// and the dense Hermitian linear algebra the other modules build on.

#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "support/errors.hpp"

namespace scatterwork::core {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;

inline constexpr double kHermitianTol   = 1e-12;  // relative
inline constexpr double kTraceTol       = 1e-12;
inline constexpr double kEigenvalueTol  = 1e-10;
inline constexpr double kDefaultGapTol  = 1e-9;   // energy units
inline constexpr int    kMaxDim         = 16;

double hermiticity_defect(const Matrix& m);

// All (j', j) pairs with j' != j, plus the gap values deduplicated under tol.
struct BohrGapTable {
    struct Entry {
        int to   = 0;  // j'
        int from = 0;  // j
        double delta = 0.0;  // e_{j'} - e_j
    };
    struct Group {
        double value = 0.0;                       // representative gap
        std::vector<std::pair<int, int>> pairs;   // (j', j) members
    };
    std::vector<Entry> gaps;
    std::vector<Group> distinct;   // ascending by value, excludes the diagonal
    double tol = kDefaultGapTol;

    double max_gap() const;  // Delta_S = max e_{j'} - e_j
    // Gap values including 0 (the diagonal), ascending; used by regime checks.
    std::vector<double> values_with_zero() const;
};

class SystemSpec {
public:
    // energies strictly ascending, coupling Hermitian to 1e-12 relative.
    SystemSpec(Vector energies, Matrix coupling, double hbar = 1.0,
               double gap_tol = kDefaultGapTol);

    int dim() const { return static_cast<int>(energies_.size()); }
    const Vector& energies() const { return energies_; }
    double energy(int j) const { return energies_(j); }
    const Matrix& coupling() const { return coupling_; }
    double hbar() const { return hbar_; }
    const BohrGapTable& gaps() const { return gaps_; }
    Matrix hamiltonian() const { return energies_.cast<Complex>().asDiagonal(); }

private:
    Vector energies_;
    Matrix coupling_;
    double hbar_;
    BohrGapTable gaps_;
};

class DensityMatrix {
public:
    // Hermitian to 1e-12, unit trace to 1e-12, eigenvalues >= -1e-10.
    explicit DensityMatrix(Matrix mat);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& mat() const { return mat_; }
    Complex operator()(int i, int j) const { return mat_(i, j); }
    double population(int j) const { return mat_(j, j).real(); }
    DensityMatrix diagonal_truncation() const;
    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    Matrix mat_;
};

struct Eigensystem {
    Vector values;   // ascending
    Matrix vectors;  // columns
};

// M = V diag(w) V^dagger for Hermitian M; throws naming the max asymmetry otherwise.
Eigensystem diagonalize_hermitian(const Matrix& m);

// exp(-i * M * scale / hbar) for Hermitian M.
Matrix unitary_exp(const Matrix& m, double scale, double hbar);

// exp(-beta H_S) / Tr exp(-beta H_S), diagonal in the energy basis.
DensityMatrix thermal_state(const SystemSpec& sys, double beta);

// Pure state |psi> = sum_j sqrt(p_j^beta) |j> with all relative phases zero;
// same diagonal as thermal_state(sys, beta).
DensityMatrix coherent_thermal_state(const SystemSpec& sys, double beta);

double unitarity_defect(const Matrix& u);

} // namespace scatterwork::core

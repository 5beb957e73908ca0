// rdm.hpp — Dense Hermitian domain types for one-body reduced density matrices
// Operators, Hamiltonians and the 1-RDM share one dense complex representation.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace fermidyn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// ------------------------------------------------------------------ errors

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised when a state handed to a Pauli-blocked generator is already unphysical.
struct PhysicalityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------------------------------------- tolerances

struct Tolerances {
    double structural{1e-10};   // Hermiticity, unitarity, completeness
    double physical{1e-8};      // spectral audit of a single state
    double trajectory{1e-6};    // violation threshold along a propagated trajectory
};

// ------------------------------------------------------------ matrix utils

double max_abs(const Matrix& m);

// ‖M − M†‖_max
double hermiticity_defect(const Matrix& m);

// (M + M†)/2
Matrix hermitize(const Matrix& m);

// Real spectrum of the Hermitian part of m, ascending. Always a self-adjoint solver.
RealVector hermitian_eigenvalues(const Matrix& m);

Matrix identity(Eigen::Index dim);

// [A, B] = AB − BA
Matrix commutator(const Matrix& a, const Matrix& b);

// ------------------------------------------------------------------ OneRdm

// One-body reduced density matrix with occupancy cap χ (1 for spin orbitals,
// 2 for spatial orbitals). Also used for the 1-hole RDM χ𝟙 − ρ.
class OneRdm {
public:
    OneRdm(Matrix data, double chi, double structural_tol = 1e-10);
    OneRdm(Matrix data, double chi, double n_electrons, double structural_tol);

    static OneRdm from_occupations(const std::vector<double>& occupations, double chi);

    Eigen::Index dim() const noexcept { return data_.rows(); }
    const Matrix& matrix() const noexcept { return data_; }
    double chi() const noexcept { return chi_; }
    double n_electrons() const noexcept { return n_electrons_; }
    double trace() const { return data_.trace().real(); }

    // χ𝟙 − ρ, with trace target d·χ − N.
    OneRdm hole() const;

private:
    Matrix data_;
    double chi_;
    double n_electrons_;
};

struct AuditReport {
    double min_eigenvalue{0.0};
    double max_eigenvalue{0.0};
    double trace{0.0};
    double hermiticity_defect{0.0};
    bool violation{false};
};

// Flags min < −tol or max > χ + tol. Never throws on well-shaped input.
AuditReport spectral_audit(const Matrix& rho, double chi, double tol = 1e-8);
AuditReport spectral_audit(const OneRdm& rho, double tol = 1e-8);

// -------------------------------------------------------- SystemHamiltonian

class SystemHamiltonian {
public:
    // Diagonal in the given eigenvector basis (identity when omitted).
    explicit SystemHamiltonian(std::vector<double> energies, double degeneracy_tol = 1e-9);
    SystemHamiltonian(std::vector<double> energies, Matrix eigenvectors,
                      double degeneracy_tol = 1e-9, double structural_tol = 1e-10);

    // Diagonalizes a Hermitian matrix.
    static SystemHamiltonian from_matrix(const Matrix& h, double degeneracy_tol = 1e-9);

    Eigen::Index dim() const noexcept { return energies_.size(); }
    const RealVector& energies() const noexcept { return energies_; }
    const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
    double degeneracy_tol() const noexcept { return degeneracy_tol_; }

    // U diag(ε) U†
    Matrix matrix() const;

    // ⟨e_j|M|e_k⟩
    Matrix to_eigenbasis(const Matrix& m) const;
    Matrix from_eigenbasis(const Matrix& m) const;

private:
    RealVector energies_;
    Matrix eigenvectors_;
    double degeneracy_tol_;
};

// --------------------------------------------------------- CouplingOperator

struct CouplingOperator {
    std::string label;
    Matrix matrix;

    CouplingOperator(std::string label, Matrix matrix, double structural_tol = 1e-10);
};

}  // namespace fermidyn

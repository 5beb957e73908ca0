// rdm.cpp — OneRdm, SystemHamiltonian and spectral audits

#include "fermidyn/rdm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fermidyn {

namespace {

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
}

}  // namespace

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
    require_square(m, "hermiticity_defect");
    return max_abs(m - m.adjoint());
}

Matrix hermitize(const Matrix& m) {
    require_square(m, "hermitize");
    return 0.5 * (m + m.adjoint());
}

RealVector hermitian_eigenvalues(const Matrix& m) {
    require_square(m, "hermitian_eigenvalues");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    }
    return solver.eigenvalues();
}

Matrix identity(Eigen::Index dim) {
    return Matrix::Identity(dim, dim);
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    return a * b - b * a;
}

// ------------------------------------------------------------------ OneRdm

OneRdm::OneRdm(Matrix data, double chi, double structural_tol)
    : OneRdm(data, chi, data.trace().real(), structural_tol) {}

OneRdm::OneRdm(Matrix data, double chi, double n_electrons, double structural_tol)
    : data_(std::move(data)), chi_(chi), n_electrons_(n_electrons) {
    require_square(data_, "OneRdm");
    if (data_.rows() == 0) {
        throw DimensionError("OneRdm: dimension must be positive");
    }
    if (!(chi_ > 0.0)) {
        throw DomainError("OneRdm: occupancy cap chi must be positive");
    }
    if (!(n_electrons_ >= 0.0)) {
        throw DomainError("OneRdm: electron count must be nonnegative");
    }
    const double defect = hermiticity_defect(data_);
    if (defect > structural_tol) {
        std::ostringstream os;
        os << "OneRdm: matrix is not Hermitian (defect " << defect << ")";
        throw DomainError(os.str());
    }
}

OneRdm OneRdm::from_occupations(const std::vector<double>& occupations, double chi) {
    const auto d = static_cast<Eigen::Index>(occupations.size());
    Matrix m = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        m(i, i) = occupations[static_cast<std::size_t>(i)];
    }
    return OneRdm(std::move(m), chi);
}

OneRdm OneRdm::hole() const {
    const double d = static_cast<double>(dim());
    return OneRdm(chi_ * identity(dim()) - data_, chi_, d * chi_ - n_electrons_, 1e-10);
}

AuditReport spectral_audit(const Matrix& rho, double chi, double tol) {
    AuditReport report;
    report.hermiticity_defect = hermiticity_defect(rho);
    report.trace = rho.trace().real();
    const RealVector ev = hermitian_eigenvalues(rho);
    report.min_eigenvalue = ev.size() ? ev.minCoeff() : 0.0;
    report.max_eigenvalue = ev.size() ? ev.maxCoeff() : 0.0;
    report.violation = report.min_eigenvalue < -tol || report.max_eigenvalue > chi + tol;
    return report;
}

AuditReport spectral_audit(const OneRdm& rho, double tol) {
    return spectral_audit(rho.matrix(), rho.chi(), tol);
}

// -------------------------------------------------------- SystemHamiltonian

SystemHamiltonian::SystemHamiltonian(std::vector<double> energies, double degeneracy_tol)
    : SystemHamiltonian(energies, identity(static_cast<Eigen::Index>(energies.size())),
                        degeneracy_tol) {}

SystemHamiltonian::SystemHamiltonian(std::vector<double> energies, Matrix eigenvectors,
                                     double degeneracy_tol, double structural_tol)
    : degeneracy_tol_(degeneracy_tol) {
    const auto d = static_cast<Eigen::Index>(energies.size());
    if (d == 0) {
        throw DimensionError("SystemHamiltonian: dimension must be positive");
    }
    if (eigenvectors.rows() != d || eigenvectors.cols() != d) {
        throw DimensionError("SystemHamiltonian: eigenvector matrix does not match energies");
    }
    if (!(degeneracy_tol >= 0.0)) {
        throw DomainError("SystemHamiltonian: degeneracy tolerance must be nonnegative");
    }
    const double unitarity = max_abs(eigenvectors.adjoint() * eigenvectors - identity(d));
    if (unitarity > structural_tol) {
        std::ostringstream os;
        os << "SystemHamiltonian: eigenvectors are not unitary (defect " << unitarity << ")";
        throw DomainError(os.str());
    }

    // Sort ascending, carrying the eigenvector columns along.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return energies[static_cast<std::size_t>(a)] < energies[static_cast<std::size_t>(b)];
    });
    energies_.resize(d);
    eigenvectors_.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        energies_(k) = energies[static_cast<std::size_t>(src)];
        eigenvectors_.col(k) = eigenvectors.col(src);
    }
}

SystemHamiltonian SystemHamiltonian::from_matrix(const Matrix& h, double degeneracy_tol) {
    require_square(h, "SystemHamiltonian::from_matrix");
    if (hermiticity_defect(h) > 1e-10) {
        throw DomainError("SystemHamiltonian::from_matrix: Hamiltonian is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(h));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("SystemHamiltonian::from_matrix: eigensolver failed");
    }
    const RealVector& ev = solver.eigenvalues();
    return SystemHamiltonian(std::vector<double>(ev.data(), ev.data() + ev.size()),
                             solver.eigenvectors(), degeneracy_tol);
}

Matrix SystemHamiltonian::matrix() const {
    return eigenvectors_ * energies_.cast<cplx>().asDiagonal() * eigenvectors_.adjoint();
}

Matrix SystemHamiltonian::to_eigenbasis(const Matrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) {
        throw DimensionError("SystemHamiltonian::to_eigenbasis: dimension mismatch");
    }
    return eigenvectors_.adjoint() * m * eigenvectors_;
}

Matrix SystemHamiltonian::from_eigenbasis(const Matrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) {
        throw DimensionError("SystemHamiltonian::from_eigenbasis: dimension mismatch");
    }
    return eigenvectors_ * m * eigenvectors_.adjoint();
}

// --------------------------------------------------------- CouplingOperator

CouplingOperator::CouplingOperator(std::string label_, Matrix matrix_, double structural_tol)
    : label(std::move(label_)), matrix(std::move(matrix_)) {
    require_square(matrix, "CouplingOperator");
    const double defect = hermiticity_defect(matrix);
    if (defect > structural_tol) {
        std::ostringstream os;
        os << "CouplingOperator '" << label << "': operator is not Hermitian (defect " << defect
           << ")";
        throw DomainError(os.str());
    }
}

}  // namespace fermidyn

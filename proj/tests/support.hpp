// support.hpp — Random Hermitian ensembles and small oracles shared by the tests

#pragma once

#include "fermidyn/rdm.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace testing {

using fermidyn::cplx;
using fermidyn::Matrix;
using fermidyn::RealVector;

inline Matrix random_hermitian(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = cplx(n(rng), n(rng));
        }
    }
    return 0.5 * (m + m.adjoint());
}

inline Matrix random_unitary(Eigen::Index d, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_hermitian(d, rng) + Matrix::Identity(d, d) * cplx(0, 1));
    return qr.householderQ();
}

// Spectrum uniform in [0, χ], trace unconstrained.
inline Matrix random_state(Eigen::Index d, double chi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, chi);
    RealVector ev(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        ev(k) = u(rng);
    }
    const Matrix v = random_unitary(d, rng);
    return v * ev.cast<cplx>().asDiagonal() * v.adjoint();
}

// Energies spread over [−1, 1] with gaps of at least 1e-3.
inline std::vector<double> random_energies(Eigen::Index d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> e;
    while (static_cast<Eigen::Index>(e.size()) < d) {
        const double x = u(rng);
        bool ok = true;
        for (double y : e) {
            ok = ok && std::abs(x - y) > 1e-3;
        }
        if (ok) {
            e.push_back(x);
        }
    }
    return e;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing

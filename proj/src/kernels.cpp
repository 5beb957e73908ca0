// kernels.cpp — Parallel loops over rates, superoperator columns and spectral grids

#include "fermidyn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fermidyn {

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {

void run_indexed(std::size_t n, Execution exec, void (*body)(std::size_t, void*), void* ctx) {
    if (exec == Execution::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i, ctx);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i), ctx);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace detail

std::vector<cplx> redfield_table(std::span<const double> omegas, const BathModel& bath,
                                 bool with_xi, Execution exec) {
    std::vector<cplx> out(omegas.size());
    parallel_for(omegas.size(), exec, [&](std::size_t i) {
        const double w = omegas[i];
        if (with_xi) {
            out[i] = spectral_function_redfield(w, bath);
        } else {
            out[i] = {std::numbers::pi * spectral_function_ule(w, bath), 0.0};
        }
    });
    return out;
}

std::vector<double> ule_lamb_table(std::span<const std::pair<double, double>> pairs,
                                   const BathModel& bath, Execution exec) {
    std::vector<double> out(pairs.size());
    parallel_for(pairs.size(), exec, [&](std::size_t i) {
        out[i] = ule_lamb_coefficient(pairs[i].first, pairs[i].second, bath);
    });
    return out;
}

Matrix kronecker_superoperator(const Matrix& h, std::span<const KroneckerTerm> terms,
                               Execution exec) {
    const Eigen::Index d = h.rows();
    const Eigen::Index d2 = d * d;
    const Matrix eye = Matrix::Identity(d, d);

    // Every contribution has the form vec(P ρ Q) = (Qᵀ ⊗ P) vec ρ.
    struct Piece {
        Matrix p;
        Matrix q;
        cplx c;
    };
    std::vector<Piece> pieces;
    pieces.push_back({h, eye, cplx(0.0, -1.0)});
    pieces.push_back({eye, h, cplx(0.0, 1.0)});
    for (const auto& t : terms) {
        const Matrix k = t.right->adjoint() * *t.left;
        pieces.push_back({*t.left, t.right->adjoint(), t.rate});
        pieces.push_back({k, eye, -0.5 * t.rate});
        pieces.push_back({eye, k, -0.5 * t.rate});
    }

    Matrix l = Matrix::Zero(d2, d2);
    // Block column q of (Qᵀ ⊗ P) is Q(q, r)·P placed at block row r; columns are disjoint.
    parallel_for(static_cast<std::size_t>(d), exec, [&](std::size_t qi) {
        const auto q = static_cast<Eigen::Index>(qi);
        for (const auto& piece : pieces) {
            for (Eigen::Index r = 0; r < d; ++r) {
                const cplx w = piece.c * piece.q(q, r);
                if (w == cplx(0.0, 0.0)) {
                    continue;
                }
                l.block(r * d, q * d, d, d) += w * piece.p;
            }
        }
    });
    return l;
}

std::vector<SpectralGridRow> spectral_grid(std::span<const double> omegas,
                                           std::span<const double> temperatures, double lambda,
                                           bool with_xi, int pv_points, Execution exec) {
    double wmax = 0.0;
    for (double w : omegas) {
        wmax = std::max(wmax, std::abs(w));
    }
    std::vector<SpectralGridRow> rows(omegas.size() * temperatures.size());
    parallel_for(rows.size(), exec, [&](std::size_t idx) {
        const std::size_t ti = idx / omegas.size();
        const std::size_t wi = idx % omegas.size();
        const BathModel bath = make_bath(lambda, temperatures[ti], wmax, pv_points);
        SpectralGridRow row;
        row.temperature = temperatures[ti];
        row.omega = omegas[wi];
        row.gamma_hat = spectral_function_ule(row.omega, bath);
        row.gamma_real = std::numbers::pi * row.gamma_hat;
        if (with_xi) {
            row.xi = xi_integral(row.omega, bath);
        }
        rows[idx] = row;
    });
    return rows;
}

}  // namespace fermidyn

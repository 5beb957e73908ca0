// kernels.hpp — OpenMP-parallel kernels with serial references
//
// Each kernel takes an Execution flag; Execution::serial runs the same loop body
// in index order and is what the tests compare the parallel path against.

#pragma once

#include "fermidyn/bath.hpp"
#include "fermidyn/rdm.hpp"

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace fermidyn {

enum class Execution { serial, parallel };

// Number of OpenMP workers (1 when built without OpenMP).
int worker_count();

namespace detail {
void run_indexed(std::size_t n, Execution exec, void (*body)(std::size_t, void*), void* ctx);
}

// Runs f(i) for i in [0, n). Exceptions are collected and the one with the lowest
// index is rethrown after the loop, so both paths fail identically.
template <class F>
void parallel_for(std::size_t n, Execution exec, F&& f) {
    auto thunk = [](std::size_t i, void* ctx) { (*static_cast<std::remove_reference_t<F>*>(ctx))(i); };
    detail::run_indexed(n, exec, thunk, static_cast<void*>(&f));
}

// Γ(ω) per frequency; the imaginary part is left 0 unless with_xi.
std::vector<cplx> redfield_table(std::span<const double> omegas, const BathModel& bath,
                                 bool with_xi, Execution exec);

// Ŝ(ω_ml, ω_ln) per frequency pair.
std::vector<double> ule_lamb_table(std::span<const std::pair<double, double>> pairs,
                                   const BathModel& bath, Execution exec);

// c · (X ρ Y† − ½{Y†X, ρ})
struct KroneckerTerm {
    const Matrix* left{nullptr};
    const Matrix* right{nullptr};
    cplx rate;
};

// Superoperator of −i[H, ·] + Σ terms in the column-major vec convention.
Matrix kronecker_superoperator(const Matrix& h, std::span<const KroneckerTerm> terms,
                               Execution exec);

struct SpectralGridRow {
    double temperature{0.0};
    double omega{0.0};
    double gamma_hat{0.0};     // Γ̂(ω)
    double gamma_real{0.0};    // Re Γ(ω)
    double xi{0.0};            // Im Γ(ω); 0 unless requested
};

// Rows ordered temperature-major, then ω.
std::vector<SpectralGridRow> spectral_grid(std::span<const double> omegas,
                                           std::span<const double> temperatures, double lambda,
                                           bool with_xi, int pv_points, Execution exec);

}  // namespace fermidyn

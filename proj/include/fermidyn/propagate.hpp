// propagate.hpp — Adaptive Dormand–Prince integration and matrix-exponential reference

#pragma once

#include "fermidyn/rdm.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fermidyn {

struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
    double rtol{1e-9};
    double atol{1e-11};
    double initial_step{0.0};       // 0 → automatic
    double max_step{0.0};           // 0 → unbounded
    double min_step_fraction{1e-13};  // relative to max(|t|, 1)
    std::size_t max_steps{50'000'000};
    std::size_t max_physicality_rejections{200};  // per output interval
    bool rehermitize{true};
};

struct IntegrationStats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t evaluations{0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
    IntegrationStats stats;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

using Rhs = std::function<Matrix(const Matrix&)>;

// 0, stride, 2·stride, …, t_end (t_end always included).
std::vector<double> output_grid(double t_end, double stride);

// Integrates dρ/dt = f(ρ) from times[0] and records ρ at every entry of times.
// Steps are shortened to land on each output time. A PhysicalityError thrown by f
// at a trial stage rejects the step; once an output interval has collected
// max_physicality_rejections of those, or when the step underflows right after one,
// the error is rethrown with the current time. Any other step underflow throws
// StiffnessError.
Trajectory integrate(const Rhs& f, const Matrix& rho0, std::span<const double> times,
                     const IntegratorOptions& options = {});

// ρ(t) = unvec(exp(𝓛 (t − t₀)) vec ρ₀), column-major vec.
Trajectory propagate_expm(const Matrix& superoperator, const Matrix& rho0,
                          std::span<const double> times);

// Null vector of 𝓛 normalized to the given trace; the steady state of a linear generator.
Matrix steady_state(const Matrix& superoperator, Eigen::Index dim, double trace);

}  // namespace fermidyn

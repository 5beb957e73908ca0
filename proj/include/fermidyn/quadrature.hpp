// quadrature.hpp — Composite Gauss–Legendre rules on geometrically graded meshes
//
// The mesh between consecutive breakpoints is refined geometrically toward both
// ends, so integrands with features at the breakpoints (thermal scale near ω=0,
// kinks of √Γ̂ at T=0, removable singularities after PV subtraction) converge
// exponentially in the number of nodes per panel.

#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fermidyn::quad {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// Cached n-point rule. Thread-safe.
const GaussLegendre& gauss_legendre(int n);

struct GradedMesh {
    double ratio{0.2};              // geometric shrink factor toward each breakpoint
    double smallest_fraction{1e-10}; // smallest panel relative to its segment
};

// Panel boundaries covering [a, b] with the given interior breakpoints.
std::vector<double> graded_panels(double a, double b, std::span<const double> breakpoints,
                                  const GradedMesh& mesh = {});

// ∫_a^b f on the graded mesh, n Gauss nodes per panel.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, int nodes_per_panel,
                 const GradedMesh& mesh = {});

// ∫_c^∞ f via ω = 1/u on (0, 1/c]. f must decay at least like 1/ω².
double integrate_to_infinity(const std::function<double(double)>& f, double c,
                             int nodes_per_panel, const GradedMesh& mesh = {});

struct RefinedResult {
    double value{0.0};        // fine-level result
    double coarse{0.0};       // result at half the resolution
    double relative_change{0.0};
};

// Evaluates `rule(n)` and `rule(2n)`; throws QuadratureError when the relative
// change exceeds `max_relative_change` (with `abs_floor` guarding near-zero results).
RefinedResult refine_and_check(const std::function<double(int)>& rule, int n,
                               double max_relative_change, double abs_floor,
                               const char* what);

}  // namespace fermidyn::quad

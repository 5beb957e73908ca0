// quadrature.cpp — Gauss–Legendre nodes and graded composite rules

#include "fermidyn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace fermidyn::quad {

namespace {

// Newton iteration on P_n with the Tricomi initial guess.
GaussLegendre compute_rule(int n) {
    GaussLegendre rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

void append_segment(std::vector<double>& out, double a, double b, const GradedMesh& mesh) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double smallest = mesh.smallest_fraction * (b - a);
    std::vector<double> offsets;
    for (double h = half * mesh.ratio; h > smallest; h *= mesh.ratio) {
        offsets.push_back(h);
    }
    // left half: a, a + h_K, ..., a + h_1, mid
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
        out.push_back(a + *it);
    }
    out.push_back(mid);
    for (double h : offsets) {
        out.push_back(b - h);
    }
    out.push_back(b);
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: order must be positive");
    }
    static std::mutex guard;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard lock(guard);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<GaussLegendre>(compute_rule(n));
    }
    return *slot;
}

std::vector<double> graded_panels(double a, double b, std::span<const double> breakpoints,
                                  const GradedMesh& mesh) {
    if (!(b > a)) {
        throw std::invalid_argument("graded_panels: empty interval");
    }
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double x, double y) { return y - x <= 1e-15 * (b - a); }),
               cuts.end());
    if (cuts.back() != b) {
        cuts.back() = b;
    }

    std::vector<double> panels{a};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        append_segment(panels, cuts[k], cuts[k + 1], mesh);
    }
    return panels;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, int nodes_per_panel,
                 const GradedMesh& mesh) {
    if (b == a) {
        return 0.0;
    }
    if (b < a) {
        return -integrate(f, b, a, breakpoints, nodes_per_panel, mesh);
    }
    const GaussLegendre& rule = gauss_legendre(nodes_per_panel);
    const std::vector<double> panels = graded_panels(a, b, breakpoints, mesh);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < panels.size(); ++k) {
        const double lo = panels[k];
        const double hi = panels[k + 1];
        const double c = 0.5 * (lo + hi);
        const double r = 0.5 * (hi - lo);
        double panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += rule.weights[i] * f(c + r * rule.nodes[i]);
        }
        total += r * panel;
    }
    return total;
}

double integrate_to_infinity(const std::function<double(double)>& f, double c,
                             int nodes_per_panel, const GradedMesh& mesh) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("integrate_to_infinity: lower limit must be positive");
    }
    auto mapped = [&](double u) { return f(1.0 / u) / (u * u); };
    return integrate(mapped, 0.0, 1.0 / c, {}, nodes_per_panel, mesh);
}

RefinedResult refine_and_check(const std::function<double(int)>& rule, int n,
                               double max_relative_change, double abs_floor,
                               const char* what) {
    RefinedResult r;
    r.coarse = rule(n);
    r.value = rule(2 * n);
    const double scale = std::max(std::abs(r.value), abs_floor);
    r.relative_change = scale > 0.0 ? std::abs(r.value - r.coarse) / scale : 0.0;
    if (!std::isfinite(r.value) || r.relative_change > max_relative_change) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (relative change " << r.relative_change
           << " between " << n << " and " << 2 * n << " nodes per panel)";
        throw QuadratureError(os.str());
    }
    return r;
}

}  // namespace fermidyn::quad

// test_bath.cpp — Drude-Lorentz bath spectral functions against closed forms and Boost quadrature

#include "doctest.h"

#include "fermidyn/bath.hpp"
#include "fermidyn/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <numbers>

using namespace fermidyn;

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

double gk(const std::function<double(double)>& f, double a, double b) {
    return GK::integrate(f, a, b, 15, 1e-13);
}

// 𝒫∫₀^∞ g(ω)/(p − ω) dω for p > 0 by subtracting g(p) on the symmetric window [0, 2p].
double pv_oracle(const std::function<double(double)>& g, double p) {
    const double gp = g(p);
    auto near = [&](double w) { return w == p ? 0.0 : (g(w) - gp) / (p - w); };
    const double inner = gk(near, 0.0, p) + gk(near, p, 2.0 * p);
    const double tail = gk([&](double w) { return g(w) / (p - w); }, 2.0 * p,
                           std::numeric_limits<double>::infinity());
    return inner + tail;
}

double n_be(double w, double kt) { return kt > 0.0 ? 1.0 / std::expm1(w / kt) : 0.0; }

double xi_oracle(double w0, double lambda, double kt) {
    auto j = [&](double w) { return w * lambda * lambda / (w * w + lambda * lambda); };
    auto g1 = [&](double w) { return j(w) * n_be(w, kt); };         // / (ω₀ + ω)
    auto g2 = [&](double w) { return j(w) * (n_be(w, kt) + 1.0); }; // / (ω₀ − ω)
    const double inf = std::numeric_limits<double>::infinity();
    double t1 = 0.0;
    double t2 = 0.0;
    if (w0 < 0.0) {
        t1 = -pv_oracle(g1, -w0);
        t2 = gk([&](double w) { return g2(w) / (w0 - w); }, 0.0, inf);
    } else {
        t1 = gk([&](double w) { return w == 0.0 ? 0.0 : g1(w) / (w0 + w); }, 0.0, inf);
        t2 = pv_oracle(g2, w0);
    }
    return t1 + t2;
}

}  // namespace

TEST_CASE("Drude-Lorentz and Bose-Einstein closed forms") {
    CHECK(drude_lorentz(0.0, 0.01) == 0.0);
    CHECK(drude_lorentz(0.01, 0.01) == doctest::Approx(0.005));
    CHECK(drude_lorentz(-0.3, 0.01) == -drude_lorentz(0.3, 0.01));
    const double kt = kBoltzmann * 300.0;
    CHECK(bose_einstein(0.002, 300.0) == doctest::Approx(1.0 / std::expm1(0.002 / kt)).epsilon(1e-14));
    CHECK(bose_einstein(0.5, 0.0) == 0.0);
    CHECK(log_bose_einstein(0.5, 50.0) == doctest::Approx(-0.5 / (kBoltzmann * 50.0)).epsilon(1e-12));
}

TEST_CASE("Gamma-hat matches J(N+1) / J N") {
    const BathModel bath = make_bath(0.01, 50.0, 1.0);
    const double kt = bath.thermal_energy();
    for (double w : {0.001, 0.003, 0.01, 0.05}) {
        const double j = drude_lorentz(w, 0.01);
        CHECK(spectral_function_ule(w, bath) ==
              doctest::Approx(j * (n_be(w, kt) + 1.0)).epsilon(1e-13));
        CHECK(spectral_function_ule(-w, bath) == doctest::Approx(j * n_be(w, kt)).epsilon(1e-13));
    }
}

TEST_CASE("KMS detailed balance") {
    for (double t : {10.0, 50.0, 300.0}) {
        const BathModel bath = make_bath(0.01, t, 1.0);
        for (double w : {0.169, 0.260, 0.491, 0.5}) {
            const double lhs = log_spectral_function_ule(w, bath) - log_spectral_function_ule(-w, bath);
            const double rhs = w / bath.thermal_energy();
            CHECK(std::abs(lhs - rhs) <= 1e-9 * rhs);
        }
    }
}

TEST_CASE("Gamma-hat is continuous at zero with value k_B T") {
    const BathModel bath = make_bath(0.01, 50.0, 1.0);
    const double kt = bath.thermal_energy();
    CHECK(spectral_function_ule(0.0, bath) == doctest::Approx(kt).epsilon(1e-12));
    // Γ̂(ω) − Γ̂(−ω) = J(ω) and Γ̂(ω) = k_B T + ω/2 + O(ω²)
    for (double eps : {1e-9, 1e-7, 1e-5}) {
        const double up = spectral_function_ule(eps, bath);
        const double down = spectral_function_ule(-eps, bath);
        CHECK(up - down == doctest::Approx(drude_lorentz(eps, 0.01)).epsilon(1e-6));
        CHECK(std::abs(0.5 * (up + down) - kt) < eps * eps / kt);
    }
}

TEST_CASE("Re Gamma = pi Gamma-hat exactly") {
    const BathModel bath = make_bath(0.01, 50.0, 1.0);
    for (double w : {-0.5, -0.169, 0.0, 0.02, 0.169, 0.491}) {
        const cplx g = spectral_function_redfield(w, bath);
        CHECK(std::abs(g.real() - std::numbers::pi * spectral_function_ule(w, bath)) <=
              1e-15 * std::abs(g.real()));
    }
}

TEST_CASE("xi(0) = -pi lambda / 2") {
    for (double t : {0.0, 50.0, 300.0}) {
        const BathModel bath = make_bath(0.01, t, 1.0);
        CHECK(xi_integral(0.0, bath) == doctest::Approx(-std::numbers::pi * 0.01 / 2).epsilon(1e-9));
        // continuous through the origin, e.g. at cluster centers that miss zero by rounding
        for (double w : {1e-17, -1e-17, 1e-12, -1e-12}) {
            CHECK(xi_integral(w, bath) == doctest::Approx(-std::numbers::pi * 0.01 / 2).epsilon(1e-7));
        }
    }
}

TEST_CASE("principal value against Boost Gauss-Kronrod with pole subtraction") {
    for (double t : {0.0, 50.0, 300.0}) {
        const BathModel bath = make_bath(0.01, t, 1.0);
        for (double w : {-0.5, -0.26, -0.169, -0.005, 0.005, 0.169, 0.26, 0.491, 0.5}) {
            const double ours = xi_integral(w, bath);
            const double ref = xi_oracle(w, 0.01, bath.thermal_energy());
            CAPTURE(t);
            CAPTURE(w);
            CHECK(std::abs(ours - ref) <= 1e-10);
        }
    }
}

TEST_CASE("principal value self-converges under grid doubling") {
    for (double t : {10.0, 50.0, 300.0}) {
        BathModel coarse = make_bath(0.01, t, 1.0, 24);
        BathModel fine = make_bath(0.01, t, 1.0, 48);
        for (double w : {-0.491, -0.169, 0.169, 0.26, 0.5}) {
            CHECK(std::abs(xi_integral(w, coarse) - xi_integral(w, fine)) < 1e-8);
        }
    }
}

TEST_CASE("rate and Lamb combinations") {
    const cplx a(0.3, 0.1);
    const cplx b(0.2, -0.05);
    CHECK(std::abs(rme_rate(a, b) - (a + std::conj(b))) == 0.0);
    CHECK(std::abs(rme_lamb(a, b) - (a - std::conj(b)) / cplx(0, 2)) < 1e-16);
    // diagonal: γ(ω,ω) = 2 Re Γ, S(ω,ω) = Im Γ
    CHECK(std::abs(rme_rate(a, a) - 2.0 * a.real()) < 1e-16);
    CHECK(std::abs(rme_lamb(a, a) - a.imag()) < 1e-16);

    const BathModel bath = make_bath(0.01, 50.0, 1.0);
    CHECK(ule_rate(0.3, bath) ==
          doctest::Approx(std::sqrt(2 * std::numbers::pi * spectral_function_ule(0.3, bath))));
}

TEST_CASE("ULE Lamb coefficient against a folded Boost integral") {
    const BathModel bath = make_bath(0.01, 300.0, 1.0);
    for (auto [wml, wln] : {std::pair{0.5, 0.5}, std::pair{0.5, -0.5}, std::pair{0.169, 0.26}, std::pair{0.0, 0.0}}) {
        auto f = [&](double w) {
            return std::sqrt(spectral_function_ule(w - wml, bath) * spectral_function_ule(w + wln, bath));
        };
        // 𝒫∫ f(ω)/ω over ℝ = ∫₀^∞ (f(ω) − f(−ω))/ω
        const double folded =
            gk([&](double w) { return w == 0.0 ? 0.0 : (f(w) - f(-w)) / w; }, 0.0,
               std::numeric_limits<double>::infinity());
        const double ref = -2.0 * std::numbers::pi * folded;
        const double ours = ule_lamb_coefficient(wml, wln, bath);
        CAPTURE(wml);
        CAPTURE(wln);
        CHECK(std::abs(ours - ref) <= 1e-7 * std::abs(ref) + 1e-12);
    }
}

TEST_CASE("bath validation") {
    CHECK_THROWS_AS(make_bath(-0.01, 50.0, 1.0), DomainError);
    CHECK_THROWS_AS(make_bath(0.01, -1.0, 1.0), DomainError);
    BathModel b = make_bath(0.01, 50.0, 0.5);
    b.pv_cutoff = 1.0;
    CHECK_THROWS_AS(b.require_cutoff_covers(0.5), DomainError);
}

TEST_CASE("graded Gauss-Legendre reproduces smooth integrals") {
    const std::vector<double> bp = {0.3};
    const double v = quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, bp, 12);
    CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    const double tail = quad::integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 2.0, 12);
    CHECK(tail == doctest::Approx(0.5).epsilon(1e-13));
    const auto& gl = quad::gauss_legendre(5);
    double s = 0.0;
    for (double w : gl.weights) {
        s += w;
    }
    CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
}

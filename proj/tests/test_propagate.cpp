// test_propagate.cpp — Dormand–Prince integrator, expm reference and steady states

#include "doctest.h"
#include "support.hpp"

#include "fermidyn/generators.hpp"
#include "fermidyn/propagate.hpp"

#include <cmath>
#include <numbers>

using namespace fermidyn;

namespace {

struct TwoLevel {
    SystemHamiltonian h{std::vector<double>{-0.25, 0.25}};
    BathModel bath = make_bath(0.01, 300.0, 0.5);
    GeneratorSpec spec;
    double down{0.0};
    double up{0.0};

    TwoLevel()
        : spec([this] {
              Matrix a = Matrix::Zero(2, 2);
              a(0, 1) = a(1, 0) = 1.0;
              GeneratorOptions o;
              o.kind = MasterEquation::universal;
              return GeneratorSpec::build(h, {CouplingOperator("X", a)}, bath, o);
          }()) {
        down = 2.0 * std::numbers::pi * spectral_function_ule(0.5, bath);
        up = 2.0 * std::numbers::pi * spectral_function_ule(-0.5, bath);
    }
};

}  // namespace

TEST_CASE("output grid always ends at t_end") {
    const auto g = output_grid(1.0, 0.3);
    REQUIRE(g.size() == 5);
    CHECK(g.front() == 0.0);
    CHECK(g[3] == doctest::Approx(0.9));
    CHECK(g.back() == 1.0);
    CHECK(output_grid(1.0, 0.25).size() == 5);
}

TEST_CASE("two-level relaxation follows the rate equation") {
    const TwoLevel s;
    const CompiledGenerator g(s.h.matrix(), s.spec);
    Matrix rho0 = Matrix::Zero(2, 2);
    rho0(1, 1) = 1.0;
    const double k = s.down + s.up;
    const double p_inf = s.up / k;
    const std::vector<double> times = output_grid(5.0 / k, 0.5 / k);
    const Trajectory tr = integrate([&](const Matrix& r) { return g(r); }, rho0, times);
    REQUIRE(tr.size() == times.size());
    for (std::size_t n = 0; n < tr.size(); ++n) {
        CHECK(tr.times[n] == times[n]);   // lands exactly
        const double expect = p_inf + (1.0 - p_inf) * std::exp(-k * times[n]);
        CHECK(std::abs(tr.states[n](1, 1).real() - expect) < 1e-8);
        CHECK(std::abs(tr.states[n](0, 1)) < 1e-12);
        CHECK(std::abs(tr.states[n].trace() - 1.0) < 1e-12);
    }
    CHECK(tr.stats.accepted > 0);
}

TEST_CASE("coherent evolution rotates coherences at the Bohr frequency") {
    const Matrix h = SystemHamiltonian({-0.25, 0.25}).matrix();
    Matrix rho0 = Matrix::Constant(2, 2, 0.5);
    const std::vector<double> times = output_grid(40.0, 4.0);
    const Trajectory tr =
        integrate([&](const Matrix& r) { return Matrix(cplx(0, -1) * commutator(h, r)); }, rho0, times);
    for (std::size_t n = 0; n < tr.size(); ++n) {
        const cplx expect = 0.5 * std::exp(cplx(0, 0.5 * times[n]));
        CHECK(std::abs(tr.states[n](0, 1) - expect) < 1e-8);
        CHECK(std::abs(tr.states[n](0, 0) - 0.5) < 1e-12);
    }
}

TEST_CASE("adaptive RK agrees with the matrix exponential") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const Eigen::Index d = 3 + trial % 2;
        const SystemHamiltonian h(testing::random_energies(d, rng), testing::random_unitary(d, rng));
        const BathModel bath = make_bath(0.01, 300.0, 2.0);
        GeneratorOptions o;
        o.kind = static_cast<MasterEquation>(trial % 3);
        o.lamb_shift = true;
        const GeneratorSpec spec =
            GeneratorSpec::build(h, {CouplingOperator("A", testing::random_hermitian(d, rng, 0.5))}, bath, o);
        const Matrix hm = h.matrix();
        const Matrix sup = superoperator_matrix(hm, spec);
        const Matrix rho0 = testing::random_state(d, 1.0, rng);
        const std::vector<double> times = output_grid(200.0, 20.0);
        const CompiledGenerator g(hm, spec);
        const Trajectory rk = integrate([&](const Matrix& r) { return g(r); }, rho0, times);
        const Trajectory ex = propagate_expm(sup, rho0, times);
        for (std::size_t n = 0; n < times.size(); ++n) {
            CHECK(max_abs(rk.states[n] - ex.states[n]) < 1e-8);
        }
    }
}

TEST_CASE("eigenstates of H are stationary without coupling") {
    const SystemHamiltonian h({-0.3, 0.1, 0.4});
    const Matrix hm = h.matrix();
    Matrix rho0 = Matrix::Zero(3, 3);
    rho0(0, 0) = 0.7;
    rho0(2, 2) = 0.2;
    const std::vector<double> times = output_grid(100.0, 10.0);
    const Trajectory tr =
        integrate([&](const Matrix& r) { return Matrix(cplx(0, -1) * commutator(hm, r)); }, rho0, times);
    for (const Matrix& m : tr.states) {
        CHECK(max_abs(m - rho0) < 1e-14);
    }
}

TEST_CASE("steady state of a linear generator is the Gibbs state") {
    const TwoLevel s;
    const Matrix sup = superoperator_matrix(s.h.matrix(), s.spec);
    const Matrix ss = steady_state(sup, 2, 1.0);
    const double ratio = ss(1, 1).real() / ss(0, 0).real();
    CHECK(ratio == doctest::Approx(std::exp(-0.5 / s.bath.thermal_energy())).epsilon(1e-9));
    CHECK(std::abs(ss.trace() - 1.0) < 1e-13);
}

TEST_CASE("finite-time blow-up raises StiffnessError") {
    // dx/dt = x², x(0) = 1 diverges at t = 1
    const Matrix x0 = Matrix::Ones(1, 1);
    const std::vector<double> times = {0.0, 2.0};
    CHECK_THROWS_AS(integrate([](const Matrix& x) { return Matrix(x * x); }, x0, times), StiffnessError);
}

TEST_CASE("persistent physicality errors are rethrown with the time") {
    const Matrix x0 = Matrix::Zero(1, 1);
    const std::vector<double> times = output_grid(1.0, 0.1);
    auto f = [](const Matrix& x) -> Matrix {
        if (x(0, 0).real() > 0.55) {
            throw PhysicalityError("occupation above band");
        }
        return Matrix::Ones(1, 1);
    };
    try {
        (void)integrate(f, x0, times);
        FAIL("expected PhysicalityError");
    } catch (const PhysicalityError& e) {
        const std::string what = e.what();
        CHECK(what.find("near t = 0.5") != std::string::npos);
        CHECK(what.find("occupation above band") != std::string::npos);
    }
}

TEST_CASE("occasional physicality errors only shorten the step") {
    // the stage probing beyond x = 0.6 fails, the solution itself never gets there
    const Matrix x0 = Matrix::Zero(1, 1);
    const std::vector<double> times = output_grid(4.0, 1.0);
    auto f = [](const Matrix& x) -> Matrix {
        if (x(0, 0).real() > 0.6) {
            throw PhysicalityError("overshoot");
        }
        return Matrix::Constant(1, 1, 0.5 - x(0, 0).real());
    };
    const Trajectory tr = integrate(f, x0, times);
    CHECK(std::abs(tr.states.back()(0, 0).real() - 0.5 * (1.0 - std::exp(-4.0))) < 1e-8);
}

TEST_CASE("integrator input validation") {
    const Matrix x0 = Matrix::Zero(2, 2);
    const std::vector<double> backwards = {1.0, 0.5};
    CHECK_THROWS(integrate([](const Matrix& x) { return x; }, x0, backwards));
    CHECK_THROWS(output_grid(1.0, 0.0));
}

// test_kernels.cpp — OpenMP kernels reproduce their serial references exactly

#include "doctest.h"
#include "support.hpp"

#include "fermidyn/generators.hpp"
#include "fermidyn/kernels.hpp"
#include "fermidyn/run.hpp"
#include "fermidyn/scenario.hpp"

#include <stdexcept>

using namespace fermidyn;

TEST_CASE("worker count is positive") { CHECK(worker_count() >= 1); }

TEST_CASE("rate tables are bit-identical across execution modes") {
    const BathModel bath = make_bath(0.01, 300.0, 1.0);
    const std::vector<double> w = {-0.491, -0.26, -0.169, 0.0, 0.169, 0.26, 0.491};
    const auto s = redfield_table(w, bath, true, Execution::serial);
    const auto p = redfield_table(w, bath, true, Execution::parallel);
    REQUIRE(s.size() == w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(s[k] == p[k]);
        CHECK(s[k] == spectral_function_redfield(w[k], bath));
    }
    const auto no_xi = redfield_table(w, bath, false, Execution::parallel);
    CHECK(no_xi[2].imag() == 0.0);

    const std::vector<std::pair<double, double>> pairs = {{0.5, 0.5}, {0.169, -0.26}, {0.0, 0.0}};
    const auto ls = ule_lamb_table(pairs, bath, Execution::serial);
    const auto lp = ule_lamb_table(pairs, bath, Execution::parallel);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        CHECK(ls[k] == lp[k]);
    }
}

TEST_CASE("Kronecker superoperator is bit-identical across execution modes") {
    std::mt19937_64 rng(12);
    const SystemHamiltonian h(testing::random_energies(4, rng), testing::random_unitary(4, rng));
    GeneratorOptions o;
    o.kind = MasterEquation::redfield;
    o.lamb_shift = true;
    const GeneratorSpec spec = GeneratorSpec::build(
        h, {CouplingOperator("A", testing::random_hermitian(4, rng))}, make_bath(0.01, 300.0, 2.0), o);
    const Matrix hm = h.matrix();
    const Matrix s = superoperator_matrix(hm, spec, Execution::serial);
    const Matrix p = superoperator_matrix(hm, spec, Execution::parallel);
    CHECK((s.array() == p.array()).all());
}

TEST_CASE("spectral grid is bit-identical and ordered temperature-major") {
    const std::vector<double> w = {-0.2, 0.0, 0.1, 0.3};
    const std::vector<double> t = {10.0, 300.0};
    const auto s = spectral_grid(w, t, 0.01, true, 24, Execution::serial);
    const auto p = spectral_grid(w, t, 0.01, true, 24, Execution::parallel);
    REQUIRE(s.size() == 8);
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(s[k].temperature == t[k / 4]);
        CHECK(s[k].omega == w[k % 4]);
        CHECK(s[k].gamma_hat == p[k].gamma_hat);
        CHECK(s[k].gamma_real == p[k].gamma_real);
        CHECK(s[k].xi == p[k].xi);
    }
}

TEST_CASE("parallel_for rethrows the lowest-index exception") {
    for (auto exec : {Execution::serial, Execution::parallel}) {
        try {
            parallel_for(64, exec, [&](std::size_t i) {
                if (i == 40 || i == 17 || i == 55) {
                    throw std::runtime_error("index " + std::to_string(i));
                }
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "index 17");
        }
    }
}

TEST_CASE("sweeps give identical trajectories in both modes") {
    std::vector<Scenario> grid;
    for (double t : {50.0, 300.0}) {
        Scenario s = builtin_three_level(MasterEquation::universal);
        s.temperature = t;
        s.schedule.t_end = 200.0;
        s.schedule.output_stride = 50.0;
        s.schedule.copropagate_hole = false;
        grid.push_back(std::move(s));
    }
    const auto a = sweep(grid, Execution::serial);
    const auto b = sweep(grid, Execution::parallel);
    REQUIRE(a.size() == 2);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].scenario.temperature == grid[k].temperature);
        REQUIRE(a[k].trajectory.size() == b[k].trajectory.size());
        for (std::size_t n = 0; n < a[k].trajectory.size(); ++n) {
            CHECK((a[k].trajectory.states[n].array() == b[k].trajectory.states[n].array()).all());
        }
    }
}

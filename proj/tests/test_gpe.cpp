#include <doctest.h>

#include <cmath>

#include "ncbogo/errors.hpp"
#include "support.hpp"

using namespace ncbogo;

TEST_CASE("non-interacting trap ground state") {
    auto s = testing::trap_state(0.0);
    CHECK(std::abs(s.mu - 0.5) < 1e-8);
    auto gauss = normalized(ComplexField::from_function(s.xi.grid, [](double x) { return std::exp(-x * x / 2); }));
    CHECK(std::abs(std::abs(inner_product(gauss, s.xi)) - 1.0) < 1e-10);
    CHECK(s.residual < 1e-8);
}

TEST_CASE("Thomas-Fermi limit of the chemical potential") {
    auto s = testing::trap_state(100.0, 256, 20.0, 1e-10);
    const double tf = std::pow(3.0 * 100.0 / (4.0 * std::sqrt(2.0)), 2.0 / 3.0);
    CHECK(std::abs(s.mu - tf) / tf < 0.02);
}

TEST_CASE("stationary states satisfy the trap virial relation") {
    for (double u : {1.0, 10.0, 50.0}) {
        auto s = testing::trap_state(u);
        CHECK(std::abs(virial_defect(s.xi, s.potential, u)) < 1e-7);
    }
}

TEST_CASE("chemical potential and energy are related through the quartic term") {
    auto s = testing::trap_state(10.0);
    auto e = energy_parts(s.xi, s.potential);
    CHECK(chemical_potential(s) == doctest::Approx(e.kinetic + e.potential + 10.0 * e.quartic));
    CHECK(energy_functional_h1(s) == doctest::Approx(e.kinetic + e.potential + 5.0 * e.quartic));
    CHECK(chemical_potential(s) - energy_functional_h1(s) > 0.0);
}

TEST_CASE("descent decreases the energy monotonically") {
    auto g = testing::box_grid();
    StationaryReport rep;
    solve_stationary(g, harmonic_potential(g), 10.0, 100.0, StationaryOptions{}, &rep);
    REQUIRE(rep.energy_history.size() > 2);
    for (size_t i = 1; i < rep.energy_history.size(); ++i)
        CHECK(rep.energy_history[i] <= rep.energy_history[i - 1] + 1e-14);
}

TEST_CASE("uniform ring condensate is constant with mu = u/L") {
    const double L = 2.0 * M_PI;
    auto s = testing::ring_state(2.0);
    CHECK(s.mu == doctest::Approx(2.0 / L).epsilon(1e-10));
    CHECK((s.xi.values.cwiseAbs().array() - 1.0 / std::sqrt(L)).abs().maxCoeff() < 1e-8);
}

TEST_CASE("linear coefficients vanish at converged states and not elsewhere") {
    for (double u : {0.0, 1.0, 10.0, 50.0}) {
        auto s = testing::trap_state(u);
        auto basis = build_phonon_basis(s, 32);
        CHECK(h2_coefficients(s, basis).norm() < 1e-8);

        auto bump = ComplexField::from_function(s.xi.grid, [](double x) { return 0.05 * x * std::exp(-x * x); });
        auto pert = make_state(normalized(s.xi + bump), s.potential, u, s.n_particles);
        CHECK(h2_coefficients(pert, basis).norm() > 1e-3);
    }
}

TEST_CASE("solver errors") {
    auto g = testing::box_grid();
    CHECK_THROWS_AS(solve_stationary(g, harmonic_potential(g), -1.0, 10.0), ConfigurationError);
    auto other = testing::box_grid(64);
    CHECK_THROWS_AS(solve_stationary(g, harmonic_potential(other), 1.0, 10.0), DimensionError);
    auto complex_v = harmonic_potential(g);
    complex_v.values[3] += cplx(0, 1);
    CHECK_THROWS_AS(solve_stationary(g, complex_v, 1.0, 10.0), ConfigurationError);
}

TEST_CASE("convergence error carries the last residual") {
    auto g = testing::box_grid();
    StationaryOptions opt;
    opt.max_iters = 2;
    opt.newton_polish = false;
    try {
        solve_stationary(g, harmonic_potential(g), 10.0, 10.0, opt);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual() > opt.tol);
    }
}

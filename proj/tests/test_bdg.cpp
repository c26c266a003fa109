#include <doctest.h>

#include <cmath>

#include "ncbogo/errors.hpp"
#include "ncbogo/homogeneous.hpp"
#include "support.hpp"

using namespace ncbogo;

namespace {

QuasiparticleSpectrum spectrum_of(const CondensateState& s, int K) {
    auto basis = build_phonon_basis(s, K);
    return diagonalize(assemble(s, basis), basis);
}

} // namespace

TEST_CASE("uniform ring reproduces the Bogoliubov dispersion") {
    const double L = 2.0 * M_PI;
    const double u = 2.0;
    auto s = testing::ring_state(u, 64, L);
    auto basis = build_phonon_basis(s, 62);
    auto sp = diagonalize(assemble(s, basis), basis);
    REQUIRE(sp.size() == 62);
    for (int j = 0; j < 31; ++j) {
        const double exact = bogoliubov_dispersion(2.0 * M_PI * (j + 1) / L, u, L);
        CHECK(std::abs(sp.energies[2 * j] - exact) / exact < 1e-8);
        CHECK(std::abs(sp.energies[2 * j + 1] - exact) / exact < 1e-8);
    }
    CHECK(sp.method == "symplectic-cholesky");
}

TEST_CASE("plane-wave basis ordering on a flat ring") {
    auto s = testing::ring_state(1.0, 32, 2.0 * M_PI);
    auto basis = build_phonon_basis(s, 4);
    const auto& x = s.xi.grid->points();
    for (int i = 0; i < 4; ++i) {
        const double k = (i % 2 == 0 ? 1.0 : -1.0) * (i / 2 + 1);
        cplx ratio = basis.modes[i].values[1] / basis.modes[i].values[0];
        CHECK(std::abs(ratio - std::exp(cplx(0, k * (x[1] - x[0])))) < 1e-10);
    }
}

TEST_CASE("Kohn mode sits at the trap frequency for every coupling") {
    for (double u : {0.0, 1.0, 10.0, 50.0}) {
        auto sp = spectrum_of(testing::trap_state(u), 64);
        const int m = testing::lowest_odd_mode(sp);
        REQUIRE(m >= 0);
        CHECK(std::abs(sp.energies[m] - 1.0) < 1e-4);
    }
}

TEST_CASE("non-interacting trap: oscillator ladder and vanishing pairing") {
    auto s = testing::trap_state(0.0);
    auto basis = build_phonon_basis(s, 32);
    auto qh = assemble(s, basis);
    CHECK(qh.g_matrix.cwiseAbs().maxCoeff() == 0.0);
    auto sp = diagonalize(qh, basis);
    for (int m = 1; m <= 10; ++m) CHECK(std::abs(sp.energies[m - 1] - m) < 1e-6);
    CHECK(std::abs(sp.omega_g) < 1e-10);
    for (int m = 0; m < 10; ++m) CHECK(mode_parity(sp, m) == (m % 2 == 0 ? -1 : 1));
}

TEST_CASE("normal and anomalous blocks have the required symmetry") {
    auto s = testing::trap_state(10.0);
    auto basis = build_phonon_basis(s, 24);
    auto qh = assemble(s, basis);
    CHECK((qh.m_matrix - qh.m_matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((qh.g_matrix - qh.g_matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((qh.m_matrix - qh.l_matrix - qh.f_matrix).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(qh.e3 < 0.0);
}

TEST_CASE("quasiparticle transformation is symplectic and invertible") {
    auto s = testing::trap_state(10.0);
    auto basis = build_phonon_basis(s, 32);
    auto qh = assemble(s, basis);
    auto sp = diagonalize(qh, basis);
    CHECK(symplectic_deviation(sp) < 1e-10);
    auto [m, g] = reconstruct_quadratic(sp);
    CHECK((m - qh.m_matrix).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((g - qh.g_matrix).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(check_stability(sp).stable);
}

TEST_CASE("single-mode form has the textbook ground shift") {
    const double a = 2.0, b = 0.7, e3 = -0.25;
    auto sp = diagonalize(make_quadratic(Eigen::MatrixXcd::Constant(1, 1, a), Eigen::MatrixXcd::Constant(1, 1, b), e3));
    const double eps = std::sqrt(a * a - b * b);
    CHECK(sp.energies[0] == doctest::Approx(eps).epsilon(1e-13));
    CHECK(sp.omega_g == doctest::Approx(e3 + 0.5 * (eps - a)).epsilon(1e-13));
    auto qh = make_quadratic(Eigen::MatrixXcd::Constant(1, 1, a), Eigen::MatrixXcd::Constant(1, 1, b), e3);
    Eigen::VectorXd occ(1);
    occ << 3.0;
    CHECK(h3_expectation(qh, occ) == doctest::Approx(sp.omega_g + 3.0 * eps));
}

TEST_CASE("unstable forms are flagged, not hidden") {
    auto dyn = diagonalize(make_quadratic(Eigen::MatrixXcd::Constant(1, 1, 0.2), Eigen::MatrixXcd::Constant(1, 1, 1.0), 0.0));
    CHECK_FALSE(dyn.stable);
    CHECK_FALSE(check_stability(dyn).stable);
    CHECK(dyn.method == "non-hermitian");

    auto neg = diagonalize(make_quadratic(Eigen::MatrixXcd::Constant(1, 1, -1.0), Eigen::MatrixXcd::Zero(1, 1), 0.0));
    auto rep = check_stability(neg);
    CHECK_FALSE(rep.stable);
    CHECK(rep.offending_modes.size() == 1);
}

TEST_CASE("energies do not depend on the choice of phonon basis") {
    auto s = testing::trap_state(10.0, 64, 16.0);
    const int n = s.xi.grid->n_points();
    const double dx = s.xi.grid->spacing();
    std::vector<ComplexField> bumps;
    for (int j = 0; j < n - 1; ++j) {
        const double c = s.xi.grid->points()[j];
        bumps.push_back(ComplexField::from_function(s.xi.grid, [&](double x) {
            return std::exp(-(x - c) * (x - c) / (dx * dx));
        }));
    }
    auto bump_basis = basis_from_fields(s, bumps);
    CHECK(bump_basis.condensate_overlap() < 1e-10);
    CHECK(bump_basis.gram_deviation() < 1e-10);
    auto a = diagonalize(assemble(s, bump_basis), bump_basis);
    auto b = spectrum_of(s, n - 2);
    for (int m = 0; m < 10; ++m) CHECK(std::abs(a.energies[m] - b.energies[m]) < 1e-7);
}

TEST_CASE("low-lying energies are insensitive to doubling the truncation") {
    auto s = testing::trap_state(10.0, 256, 20.0);
    auto a = spectrum_of(s, 64);
    auto b = spectrum_of(s, 128);
    for (int m = 0; m < 12; ++m) CHECK(std::abs(a.energies[m] - b.energies[m]) < 1e-6);
}

TEST_CASE("projector kernel acts as the identity on the mode space") {
    auto s = testing::trap_state(1.0, 64, 16.0);
    auto basis = build_phonon_basis(s, 10);
    auto R = projector_kernel(basis);
    const double dx = s.xi.grid->spacing();
    for (const auto& m : basis.modes) CHECK(((R * m.values) * dx - m.values).norm() < 1e-10);
    CHECK(((R * s.xi.values) * dx).norm() < 1e-10);
}

TEST_CASE("bdg argument errors") {
    auto s = testing::trap_state(1.0, 64, 16.0);
    CHECK_THROWS_AS(build_phonon_basis(s, 63), ConfigurationError);
    CHECK_THROWS_AS(build_phonon_basis(s, 0), ConfigurationError);
    auto other = testing::trap_state(1.0, 128, 16.0);
    CHECK_THROWS_AS(assemble(s, build_phonon_basis(other, 4)), DimensionError);
    CHECK_THROWS_AS(make_quadratic(Eigen::MatrixXcd::Zero(2, 2), Eigen::MatrixXcd::Zero(3, 3), 0.0), DimensionError);
    auto qh = make_quadratic(Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Zero(2, 2), 0.0);
    CHECK_THROWS_AS(h3_expectation(qh, Eigen::VectorXd::Ones(3)), DimensionError);
    CHECK_THROWS_AS(h3_expectation(qh, -Eigen::VectorXd::Ones(2)), DomainError);
}

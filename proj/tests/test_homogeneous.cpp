#include <doctest.h>

#include <cmath>
#include <random>

#include "ncbogo/errors.hpp"
#include "ncbogo/homogeneous.hpp"

using namespace ncbogo;

TEST_CASE("dispersion values") {
    CHECK(bogoliubov_dispersion(1.0, 2.0, 1.0) == doctest::Approx(std::sqrt(0.5 * 4.5)));
    CHECK(bogoliubov_dispersion(1.0, 0.75, 1.0) == doctest::Approx(1.0));
    for (double k : {0.1, 1.0, 3.0}) CHECK(bogoliubov_dispersion(k, 0.0, 5.0) == doctest::Approx(k * k / 2));
    CHECK(bogoliubov_dispersion(-2.0, 1.0, 3.0) == bogoliubov_dispersion(2.0, 1.0, 3.0));
    CHECK_THROWS_AS(bogoliubov_dispersion(0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bogoliubov_dispersion(1.0, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bogoliubov_dispersion(1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("dispersion is linear at long wavelength") {
    const double u = 10.0, L = 200.0;
    const double k = 1e-4;
    CHECK(bogoliubov_dispersion(k, u, L) / k == doctest::Approx(std::sqrt(u / L)).epsilon(1e-6));
    const double k1 = 2 * M_PI / L, k2 = 2 * k1;
    const double v = fit_sound_speed(k1, bogoliubov_dispersion(k1, u, L), k2, bogoliubov_dispersion(k2, u, L));
    CHECK(std::abs(v - std::sqrt(u / L)) / std::sqrt(u / L) < 1e-4);
}

TEST_CASE("odd cubic fit is exact on odd cubics") {
    auto f = [](double k) { return 0.3 * k - 2.0 * k * k * k; };
    CHECK(fit_sound_speed(0.1, f(0.1), 0.25, f(0.25)) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("phase and density amplitudes form a canonical pair") {
    std::mt19937_64 rng(20261014);
    std::uniform_real_distribution<double> lg(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double k = std::pow(10.0, lg(rng)), u = std::pow(10.0, lg(rng));
        const double n = std::pow(10.0, 1.0 + lg(rng)), V = std::pow(10.0, lg(rng));
        auto h = hydro_coefficients(k, u, n, V);
        CHECK(std::abs(h.phi_coeff * h.rho_coeff - 0.5) < 1e-14);
        CHECK(h.sound_energy == doctest::Approx(k * h.v_sound));
    }
}

TEST_CASE("hydrodynamic amplitudes scale with N at fixed u N") {
    auto a = hydro_coefficients(0.5, 0.01, 1000.0, 40.0);
    auto b = hydro_coefficients(0.5, 0.005, 2000.0, 40.0);
    CHECK(b.v_sound == doctest::Approx(a.v_sound));
    CHECK(b.phi_coeff == doctest::Approx(a.phi_coeff / std::sqrt(2.0)));
    CHECK(b.rho_coeff == doctest::Approx(a.rho_coeff * std::sqrt(2.0)));
    CHECK(a.v_sound == doctest::Approx(std::sqrt(0.01 * 1000.0 / 40.0)));
    CHECK(a.rho0 == doctest::Approx(25.0));
}

TEST_CASE("two-particle Fock spectrum by hand") {
    const double V = 2.0 * M_PI, u = 0.8;
    const double g = u / V, e = 0.5;
    auto sp = exact_fock_spectrum(2, 1.0, u, V, 2);
    // zero-momentum sector {|2,0,0>, |0,1,1>}
    const double a = g, d = 2 * e + 2 * g, c = std::sqrt(2.0) * g;
    const double e0 = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + c * c);
    CHECK(sp.ground_energy == doctest::Approx(e0).epsilon(1e-13));
    CHECK(sp.phonon_gap == doctest::Approx(e + 2 * g - e0).epsilon(1e-13));
    CHECK(sp.dimension == 6);
    CHECK(sp.cross_number_elements == 0);
    CHECK(sp.cross_momentum_elements == 0);
}

TEST_CASE("free Fock spectrum") {
    auto sp = exact_fock_spectrum(12, 1.5, 0.0, 3.0, 12);
    CHECK(sp.ground_energy == 0.0);
    CHECK(sp.phonon_gap == doctest::Approx(1.125));
    CHECK(std::abs(homogeneous_ground_prediction(12, 1.5, 0.0, 3.0)) < 1e-14);
}

TEST_CASE("ground prediction from the two-mode form") {
    const double n = 30, k = 1.0, ut = 1.0, V = 2 * M_PI;
    const double e = 0.5, g = ut / V;
    const double eps = std::sqrt(e * (e + 2 * g));
    CHECK(homogeneous_ground_prediction(n, k, ut, V) == doctest::Approx(n * g / 2 - g / 2 + eps - e - g).epsilon(1e-13));
}

TEST_CASE("excitation cap converges to the full basis") {
    const int n = 20;
    const double u = 1.0 / n;
    auto full = exact_fock_spectrum(n, 1.0, u, 2 * M_PI, n);
    auto capped = exact_fock_spectrum(n, 1.0, u, 2 * M_PI, 12);
    CHECK(capped.dimension < full.dimension);
    CHECK(std::abs(capped.ground_energy - full.ground_energy) < 1e-8);
    CHECK(std::abs(capped.phonon_gap - full.phonon_gap) < 1e-8);
}

TEST_CASE("Fock corrections shrink like 1/N") {
    std::vector<FockSpectrum> specs;
    for (int n : {10, 20, 40}) specs.push_back(exact_fock_spectrum(n, 1.0, 1.0 / n, 2 * M_PI, n));
    auto study = compare_asymptotics(specs, 1.0);
    CHECK(study.gap_error_monotone);
    CHECK(study.gap_power >= 0.5);
    CHECK(study.gap_power <= 1.5);
    const double ratio = study.points[1].gap_error / study.points[0].gap_error;
    CHECK(std::abs(ratio - 0.5) < 0.15);
    for (const auto& s : specs) {
        CHECK(s.cross_number_elements == 0);
        CHECK(s.cross_momentum_elements == 0);
    }
    CHECK(study.points[2].gap_bogoliubov == doctest::Approx(bogoliubov_dispersion(1.0, 1.0, 2 * M_PI)));
}

TEST_CASE("inverse power fit") {
    std::vector<double> n{10, 20, 40, 80}, e;
    for (double x : n) e.push_back(3.0 / (x * x));
    CHECK(fit_inverse_power(n, e) == doctest::Approx(2.0));
}

TEST_CASE("Fock parameter errors") {
    CHECK_THROWS_AS(exact_fock_spectrum(0, 1.0, 0.1, 1.0, 0), ConfigurationError);
    CHECK_THROWS_AS(exact_fock_spectrum(700, 1.0, 0.001, 1.0, 700), ResourceError);
    CHECK_NOTHROW(exact_fock_spectrum(700, 1.0, 0.001, 1.0, 100));
    CHECK_THROWS_AS(exact_fock_spectrum(10, 1.0, 0.1, 1.0, 11), ConfigurationError);
    CHECK_THROWS_AS(exact_fock_spectrum(10, 1.0, 0.1, 1.0, -1), ConfigurationError);
}

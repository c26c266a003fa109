#include <doctest.h>

#include <cmath>

#include "ncbogo/errors.hpp"
#include "support.hpp"

using namespace ncbogo;

TEST_CASE("periodic kinetic operator on a plane wave") {
    auto g = testing::ring_grid(64, 2.0 * M_PI);
    for (int k : {1, 3, 7, 20}) {
        auto f = ComplexField::from_function(g, [k](double x) { return std::exp(cplx(0, k * x)); });
        auto tf = apply_kinetic(f);
        CHECK((tf.values - 0.5 * k * k * f.values).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("box kinetic operator on a wall-vanishing sine") {
    const double L = 20.0;
    auto g = testing::box_grid(127, L);
    for (int m : {1, 2, 5, 30}) {
        const double k = M_PI * m / L;
        auto f = ComplexField::from_function(g, [&](double x) { return std::sin(k * (x + L / 2)); });
        auto tf = apply_kinetic(f);
        CHECK((tf.values - 0.5 * k * k * f.values).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("kinetic matrix agrees with the spectral action") {
    for (auto g : {testing::ring_grid(32, 5.0), testing::box_grid(40, 7.0)}) {
        const auto& T = g->kinetic_matrix();
        CHECK((T - T.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        auto f = ComplexField::from_function(g, [](double x) { return std::exp(-x * x) * cplx(1.0, 0.3 * x); });
        Eigen::VectorXcd direct = T.cast<cplx>() * f.values;
        CHECK((direct - apply_kinetic(f).values).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("grid geometry") {
    auto p = build_grid(16, 4.0, Boundary::periodic, -2.0);
    CHECK(p->spacing() == doctest::Approx(0.25));
    CHECK(p->points()[0] == doctest::Approx(-2.0));
    auto b = build_grid(15, 4.0, Boundary::box, -2.0);
    CHECK(b->spacing() == doctest::Approx(0.25));
    CHECK(b->points()[0] == doctest::Approx(-1.75));
    CHECK(b->points()[14] == doctest::Approx(1.75));
    for (int j = 0; j < 15; ++j) CHECK(b->points()[b->mirror_index(j)] == doctest::Approx(-b->points()[j]));
}

TEST_CASE("inner product and normalization") {
    auto g = testing::box_grid(200, 20.0);
    auto f = ComplexField::from_function(g, [](double x) { return std::exp(-x * x / 2); });
    CHECK(norm(f) == doctest::Approx(std::pow(M_PI, 0.25)).epsilon(1e-10));
    auto n = normalized(f);
    CHECK(std::abs(inner_product(n, n) - 1.0) < 1e-14);
    auto h = cplx(0, 2) * n;
    CHECK(std::abs(inner_product(n, h) - cplx(0, 2)) < 1e-14);
}

TEST_CASE("orthonormalize") {
    auto g = testing::box_grid(64, 10.0);
    std::vector<ComplexField> fs;
    for (int p = 0; p < 5; ++p)
        fs.push_back(ComplexField::from_function(g, [p](double x) { return std::pow(x, p) * std::exp(-x * x / 4); }));
    auto against = normalized(ComplexField::from_function(g, [](double x) { return std::exp(-x * x); }));
    auto out = orthonormalize(fs, against);
    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(std::abs(inner_product(against, out[i])) < 1e-12);
        for (size_t j = 0; j < out.size(); ++j)
            CHECK(std::abs(inner_product(out[i], out[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }

    fs.push_back(fs[1] + fs[2]);
    try {
        orthonormalize(fs);
        FAIL("expected DegeneracyError");
    } catch (const DegeneracyError& e) {
        CHECK(e.index() == 5);
    }
}

TEST_CASE("grid construction errors") {
    CHECK_THROWS_AS(build_grid(48, 1.0, Boundary::periodic), ConfigurationError);
    CHECK_THROWS_AS(build_grid(4, 1.0, Boundary::box), ConfigurationError);
    CHECK_THROWS_AS(build_grid(16, -1.0, Boundary::box), ConfigurationError);
    CHECK_NOTHROW(build_grid(48, 1.0, Boundary::box));
    CHECK_THROWS_AS(boundary_from_string("dirichlet"), ConfigurationError);
}

TEST_CASE("fields on different grids do not mix") {
    auto a = ComplexField(testing::ring_grid(32, 1.0));
    auto b = ComplexField(testing::ring_grid(32, 2.0));
    CHECK_THROWS_AS(inner_product(a, b), DimensionError);
    CHECK_THROWS_AS(a + b, DimensionError);
}

TEST_CASE("reflection") {
    auto g = testing::box_grid(33, 6.0);
    auto f = ComplexField::from_function(g, [](double x) { return cplx(x, x * x); });
    auto r = reflect(f);
    for (int j = 0; j < g->n_points(); ++j)
        CHECK(std::abs(r.values[j] - cplx(-g->points()[j], g->points()[j] * g->points()[j])) < 1e-12);
}

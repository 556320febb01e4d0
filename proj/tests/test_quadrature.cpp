#include "doctest.h"

#include "wasep/quadrature.hpp"

#include <cmath>
#include <stdexcept>

using namespace wasep;

TEST_CASE("simpson_refine reproduces exact integrals") {
    // cubic: Simpson is exact at any step
    const double cubic = simpson_refine([](double x) { return x * x * x; }, 0.0, 2.0, 0.5);
    CHECK(cubic == doctest::Approx(4.0).epsilon(1e-12));

    QuadSpec tight;
    tight.rel_tol = 1e-12;
    tight.abs_floor = 1e-14;
    const double sine = simpson_refine([](double x) { return std::sin(x); }, 0.0, M_PI, 0.25, tight);
    CHECK(sine == doctest::Approx(2.0).epsilon(1e-10));

    // oscillatory integrand with a known closed form
    const double osc = simpson_refine([](double x) { return std::exp(-x) * std::cos(3.0 * x); },
                                      0.0, 1.0, 0.125);
    const double exact = (1.0 - std::exp(-1.0) * (std::cos(3.0) - 3.0 * std::sin(3.0))) / 10.0;
    CHECK(osc == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("simpson_refine degenerate and reversed intervals") {
    CHECK(simpson_refine([](double) { return 7.0; }, 1.5, 1.5, 0.1) == 0.0);
    CHECK_THROWS_AS(simpson_refine([](double) { return 1.0; }, 2.0, 1.0, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(simpson_refine([](double) { return 1.0; }, 0.0, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("simpson_refine throws when the refinement budget is exhausted") {
    QuadSpec spec;
    spec.rel_tol = 1e-14;
    spec.abs_floor = 1e-30;
    spec.max_refine = 2;
    // |x|^{1/2} has unbounded derivatives at 0, so two refinements cannot reach 1e-14
    CHECK_THROWS_AS(
        simpson_refine([](double x) { return std::sqrt(std::fabs(x)); }, 0.0, 1.0, 0.5, spec),
        std::runtime_error);
}

TEST_CASE("gauss_hermite nodes integrate polynomials against exp(-x^2)") {
    const GaussHermite gh = gauss_hermite(24);
    REQUIRE(gh.nodes.size() == 24);
    REQUIRE(gh.weights.size() == 24);

    double w_sum = 0, m2 = 0, m4 = 0, m6 = 0, odd = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double x = gh.nodes[i], w = gh.weights[i];
        w_sum += w;
        m2 += w * x * x;
        m4 += w * x * x * x * x;
        m6 += w * std::pow(x, 6);
        odd += w * x * x * x;
    }
    const double sp = std::sqrt(M_PI);
    CHECK(w_sum == doctest::Approx(sp).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(0.5 * sp).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(0.75 * sp).epsilon(1e-13));
    CHECK(m6 == doctest::Approx(15.0 / 8.0 * sp).epsilon(1e-13));
    CHECK(std::fabs(odd) < 1e-13);
}

TEST_CASE("gauss_hermite handles non-polynomial integrands") {
    // int exp(-x^2) cos(2bx) dx = sqrt(pi) exp(-b^2)
    const GaussHermite gh = gauss_hermite(48);
    double acc = 0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        acc += gh.weights[i] * std::cos(2.0 * 0.8 * gh.nodes[i]);
    CHECK(acc == doctest::Approx(std::sqrt(M_PI) * std::exp(-0.64)).epsilon(1e-12));
}

TEST_CASE("gauss_hermite rejects bad orders") {
    CHECK_THROWS_AS(gauss_hermite(0), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckelab/energies.hpp"
#include "ckelab/quadrature.hpp"

#include <cmath>

using namespace ckelab;

TEST_CASE("gauss rule integrates polynomials exactly") {
    const GaussRule& g8 = GaussRule::get(8);
    auto poly = [](double x) { return 5 * std::pow(x, 15) - 2 * std::pow(x, 7) + x; };
    // degree 15 = 2*8 - 1 is exact
    CHECK(g8.apply(poly, 0.0, 1.0) == doctest::Approx(5.0 / 16 - 0.25 + 0.5).epsilon(1e-14));
}

TEST_CASE("tanh-sinh handles endpoint singularities") {
    CHECK(integrate_01([](double x, double) { return 1.0 / std::sqrt(x); }) ==
          doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate_01([](double x, double) { return std::log(x); }) ==
          doctest::Approx(-1.0).epsilon(1e-13));
    // symmetric power singularity: beta function B(0.3, 0.3); the exact
    // complement keeps the x -> 1 end accurate
    CHECK(integrate_01([](double x, double xc) {
              return std::pow(x, -0.7) * std::pow(xc, -0.7);
          }) == doctest::Approx(std::tgamma(0.3) * std::tgamma(0.3) / std::tgamma(0.6))
                    .epsilon(1e-12));
    // a tail so heavy that fixed panel floors would truncate O(1) mass
    CHECK(integrate_01([](double x, double) { return std::pow(x, -0.95); }) ==
          doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("tanh-sinh resolves narrow boundary layers") {
    // int_0^1 eps/(x+eps)^2 dx = 1 - eps/(1+eps)
    for (double eps : {1e-3, 1e-6, 1e-9}) {
        const double exact = 1.0 - eps / (1.0 + eps);
        CHECK(integrate_01([eps](double x, double) {
                  return eps / ((x + eps) * (x + eps));
              }) == doctest::Approx(exact).epsilon(1e-11));
    }
}

TEST_CASE("graded panels: partial intervals and cumulative integrals") {
    const GradedPanels& p = default_panels();
    const double v = p.integrate([](double x) { return std::cos(x); }, 0.2, 0.7);
    CHECK(v == doctest::Approx(std::sin(0.7) - std::sin(0.2)).epsilon(1e-13));

    CumulativeIntegral F([](double x) { return 3.0 * x * x; }, p);
    for (double x : {1e-8, 0.123, 0.5, 0.987, 1.0})
        CHECK(F(x) == doctest::Approx(x * x * x).epsilon(1e-12));
    CHECK(F.total() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("lemma-3.5 constant against an independent high-precision oracle") {
    // adaptive-quadrature oracle value of int log(1 + 1/|S|^2) omega0
    CHECK(regularization_gap_constant() == doctest::Approx(27.043391339437562).epsilon(1e-12));
}

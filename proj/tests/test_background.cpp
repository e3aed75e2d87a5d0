#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckelab/background.hpp"
#include "ckelab/quadrature.hpp"

#include <cmath>

using namespace ckelab;

TEST_CASE("cone parameter validation") {
    ConeParameters p;
    p.beta = 0.5;
    p.beta0 = 0.5;
    p.epsilon = 0.1;
    p.lp_exponent = 1.9;
    CHECK_NOTHROW(p.validate());
    CHECK(p.c_beta() == doctest::Approx(0.5));

    ConeParameters bad = p;
    bad.beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.beta = 0.4;  // below beta0
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.epsilon = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.lp_exponent = 2.5;  // 2.5 * (1 - 0.5) >= 1
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("background closed-form identities hold pointwise") {
    const RadialGrid g = RadialGrid::make(2048);
    for (int i = 0; i < g.n; i += 7) {
        const double x = g.x[i];
        const double s = g.s[i];
        // -(log u0'')'' = u0'' via the closed derivative chain
        const double m = BackgroundGeometry::u0_ss(x);
        const double mp = BackgroundGeometry::u0_sss(x);
        const double mpp = BackgroundGeometry::u0_ssss(x);
        const double r = (mp * mp - mpp * m) / (m * m);
        CHECK(std::abs(r - m) < 1e-10);
        // Poincare-Lelong consistency: |S|^2 e^{u0} = e^s
        const double lhs = BackgroundGeometry::divisor_norm(x) *
                           std::exp(BackgroundGeometry::u0(x));
        CHECK(lhs == doctest::Approx(std::exp(s)).epsilon(1e-10));
        CHECK(BackgroundGeometry::divisor_norm(x) <= 0.25 + 1e-15);
        CHECK(BackgroundGeometry::ricci_potential(x) == 0.0);
    }
    CHECK(BackgroundGeometry::u0(0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
    CHECK(BackgroundGeometry::divisor_norm(0.5) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("twisting profile: positivity, boundedness, class mass") {
    const RadialGrid g = RadialGrid::make(1024);
    for (double eps : {1.0, 0.1, 1e-2, 1e-4, 1e-6}) {
        const TwistingProfile t = TwistingProfile::make(g, eps);
        for (double v : t.chi_eps) CHECK(v > 0.0);
        // class of chi_eps equals the class of omega0
        CHECK(std::abs(TwistingProfile::mass(eps) - 2.0) < 1e-8);
    }
    // stays bounded as eps -> 1
    for (int i = 0; i < g.n; i += 31)
        CHECK(TwistingProfile::chi_s(g.x[i], 1.0 - g.x[i], 1.0) < 10.0);
    CHECK_THROWS_AS(TwistingProfile::make(g, 0.0), std::invalid_argument);
}

TEST_CASE("twisting profile degenerates to -(log |S|^2)'' + u0'' as eps -> 0") {
    // away from the poles chi_eps -> 0 (the limit current concentrates there)
    for (double x : {0.2, 0.5, 0.8})
        CHECK(std::abs(TwistingProfile::chi_s(x, 1.0 - x, 1e-12)) < 1e-9);
}

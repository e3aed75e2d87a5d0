#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckelab/background.hpp"
#include "ckelab/grid.hpp"

#include <cmath>

using namespace ckelab;

TEST_CASE("midpoint grid invariants") {
    const RadialGrid g = RadialGrid::make(4096);
    CHECK(g.n == 4096);
    for (int i = 1; i < g.n; ++i) CHECK(g.x[i] > g.x[i - 1]);
    for (int i = 0; i < g.n; ++i) CHECK(g.w[i] > 0.0);
    // the round measure is exactly 2 dx, so the quadrature of u0'' is exact
    std::vector<double> u0pp(g.n);
    for (int i = 0; i < g.n; ++i) u0pp[i] = BackgroundGeometry::u0_ss(g.x[i]);
    CHECK(g.integrate_s(u0pp) == doctest::Approx(2.0).epsilon(1e-12));
    // coordinate maps are mutually inverse
    for (double x : {1e-6, 0.3, 0.5, 0.9, 1.0 - 1e-6})
        CHECK(x_of_s(s_of_x(x)) == doctest::Approx(x).epsilon(1e-12));
    CHECK_THROWS_AS(RadialGrid::make(4), std::invalid_argument);
}

TEST_CASE("fd_weights reproduces classic stencils") {
    const std::vector<double> nodes = {-1.5, -0.5, 0.5, 1.5};
    const std::vector<double> w = fd_weights(0.0, nodes, 1);
    CHECK(w[0] * 24 == doctest::Approx(1.0));
    CHECK(w[1] * 24 == doctest::Approx(-27.0));
    CHECK(w[2] * 24 == doctest::Approx(27.0));
    CHECK(w[3] * 24 == doctest::Approx(-1.0));
}

TEST_CASE("derivatives are fourth order on smooth data") {
    double prev_err = 0.0;
    for (int n : {256, 512, 1024}) {
        const RadialGrid g = RadialGrid::make(n);
        std::vector<double> f(g.n), fx_exact(g.n), fxx_exact(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x[i];
            f[i] = std::sin(3.0 * x) * std::exp(x);
            fx_exact[i] = std::exp(x) * (std::sin(3.0 * x) + 3.0 * std::cos(3.0 * x));
            fxx_exact[i] = std::exp(x) * (6.0 * std::cos(3.0 * x) - 8.0 * std::sin(3.0 * x));
        }
        const std::vector<double> fx = deriv_x(g, f);
        const std::vector<double> fxx = deriv_xx(g, f);
        double err = 0.0;
        for (int i = 0; i < g.n; ++i) {
            err = std::max(err, std::abs(fx[i] - fx_exact[i]));
            err = std::max(err, std::abs(fxx[i] - fxx_exact[i]));
        }
        if (prev_err > 0.0) {
            const double order = std::log2(prev_err / err);
            CHECK(order > 2.8);  // fxx loses one order at the boundary stencils
        }
        prev_err = err;
    }
}

TEST_CASE("s-derivatives by chain rule match closed forms") {
    const RadialGrid g = RadialGrid::make(2048);
    // f = x^2(1-x): f_s = x(1-x)(2x - 3x^2), f_ss = x(1-x) d/dx[x(1-x) f_x]
    std::vector<double> f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = g.x[i] * g.x[i] * (1.0 - g.x[i]);
    const std::vector<double> d1 = deriv_s(g, f);
    const std::vector<double> d2 = deriv_ss(g, f);
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        const double c = x * (1.0 - x);
        const double fx = 2.0 * x - 3.0 * x * x;
        const double fxx = 2.0 - 6.0 * x;
        e1 = std::max(e1, std::abs(d1[i] - c * fx));
        e2 = std::max(e2, std::abs(d2[i] - c * ((1.0 - 2.0 * x) * fx + c * fxx)));
    }
    CHECK(e1 < 1e-11);  // cubic: exact for the quartic stencils up to roundoff
    CHECK(e2 < 1e-9);
}

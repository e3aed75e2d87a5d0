#include "ckelab/background.hpp"

#include "ckelab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ckelab {

void ConeParameters::validate() const {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("ConeParameters: beta must lie in (0,1]");
    if (!(beta >= beta0))
        throw std::invalid_argument("ConeParameters: beta < beta0");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("ConeParameters: epsilon must lie in (0,1]");
    if (!(lp_exponent > 1.0) || !(lp_exponent * (1.0 - beta0) < 1.0))
        throw std::invalid_argument("ConeParameters: lp_exponent outside (1, 1/(1-beta0))");
}

double BackgroundGeometry::u0(double x) { return -2.0 * std::log1p(-x); }
double BackgroundGeometry::u0_s(double x) { return 2.0 * x; }
double BackgroundGeometry::u0_ss(double x) { return 2.0 * x * (1.0 - x); }
double BackgroundGeometry::u0_sss(double x) { return 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }
double BackgroundGeometry::u0_ssss(double x) {
    return 2.0 * x * (1.0 - x) * (1.0 - 6.0 * x + 6.0 * x * x);
}
double BackgroundGeometry::divisor_norm(double x) { return x * (1.0 - x); }

BackgroundGeometry BackgroundGeometry::make(const RadialGrid& g, double lambda) {
    BackgroundGeometry bg;
    bg.lambda = lambda;
    bg.u0_vals.resize(g.n);
    bg.u0pp_vals.resize(g.n);
    bg.s2_vals.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        bg.u0_vals[i] = u0(g.x[i]);
        bg.u0pp_vals[i] = u0_ss(g.x[i]);
        bg.s2_vals[i] = divisor_norm(g.x[i]);
    }
    return bg;
}

double TwistingProfile::chi_s(double x, double xc, double eps) {
    return chi_dens(x, xc, eps) * x * xc;
}

double TwistingProfile::chi_dens(double x, double xc, double eps) {
    // (log(f+eps))''(s)/(x(1-x)) + 2 with f = x(1-x):
    //   [A' l - A (xc-x)] / l^2 + 2,  A = x xc (xc-x), A' = 1 - 6 x xc
    const double f = x * xc;
    const double l = f + eps;
    const double A = f * (xc - x);
    const double Ap = 1.0 - 6.0 * f;
    return (Ap * l - A * (xc - x)) / (l * l) + 2.0;
}

TwistingProfile TwistingProfile::make(const RadialGrid& g, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("TwistingProfile: eps must be positive");
    TwistingProfile t;
    t.epsilon = eps;
    t.chi_eps.resize(g.n);
    for (int i = 0; i < g.n; ++i) t.chi_eps[i] = chi_s(g.x[i], 1.0 - g.x[i], eps);
    return t;
}

double TwistingProfile::mass(double eps) {
    return integrate_01([eps](double x, double xc) { return chi_dens(x, xc, eps); });
}

} // namespace ckelab

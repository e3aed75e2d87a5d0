#pragma once

#include "ckelab/grid.hpp"

#include <vector>

namespace ckelab {

/// Cone-angle and regularization parameters.  For lambda = 1 the Einstein
/// constant c_beta = 1 - lambda(1 - beta) equals beta.
struct ConeParameters {
    double beta = 1.0;        // cone-angle parameter in (0,1]
    double beta0 = 0.5;       // lower threshold, beta >= beta0
    double lambda = 1.0;      // divisor multiple (1 for geometric runs)
    double epsilon = 1.0;     // regularization parameter in (0,1]
    double lp_exponent = 1.9; // p0 in (1, 1/(1-beta0))

    double c_beta() const { return 1.0 - lambda * (1.0 - beta); }
    void validate() const;
};

/// Reference geometry of the round background:
///   u0(s)      = 2 log(1+e^s)
///   u0''(s)    = 2 e^s/(1+e^s)^2 = 2 x(1-x)
///   |S|^2_h(s) = e^s/(1+e^s)^2  = x(1-x)
///   h_{omega0} = 0  (the round metric is Kahler-Einstein)
/// All closed forms take the compact coordinate x.
struct BackgroundGeometry {
    double lambda = 1.0;

    static double u0(double x);         // u0(s(x))
    static double u0_s(double x);       // du0/ds = 2x
    static double u0_ss(double x);      // d2u0/ds2 = 2x(1-x)
    static double u0_sss(double x);     // 2x(1-x)(1-2x)
    static double u0_ssss(double x);    // 2x(1-x)(1-6x+6x^2)
    static double divisor_norm(double x);       // |S|^2_h = x(1-x)
    static double ricci_potential(double /*x*/) { return 0.0; }

    // grid samples
    std::vector<double> u0_vals, u0pp_vals, s2_vals;

    static BackgroundGeometry make(const RadialGrid& g, double lambda = 1.0);
};

/// Radial coefficient of chi_eps = i ddbar log(|S|^2_h + eps) + omega0,
/// i.e. (log(|S|^2+eps))''(s) + u0''(s).  Positive for every eps > 0 and of
/// total s-mass 2 (same cohomology class as omega0).
struct TwistingProfile {
    double epsilon = 1.0;
    std::vector<double> chi_eps;  // s-unit samples on the grid

    /// closed-form value in s-units at coordinate (x, 1-x)
    static double chi_s(double x, double xc, double eps);
    /// dx-density: chi_s / (x(1-x)), bounded on (0,1) for eps > 0
    static double chi_dens(double x, double xc, double eps);

    static TwistingProfile make(const RadialGrid& g, double eps);

    /// int chi_eps ds via graded panels (layer-resolving); equals 2 up to
    /// quadrature error for every eps in (0,1].
    static double mass(double eps);
};

} // namespace ckelab

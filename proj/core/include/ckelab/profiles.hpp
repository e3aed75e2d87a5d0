#pragma once

#include "ckelab/background.hpp"
#include "ckelab/grid.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ckelab {

/// A radial function of the compact coordinate with closed-form x-derivatives.
/// Evaluators receive both x and the exact complement xc = 1-x, so closed
/// forms stay accurate arbitrarily close to the poles (quadrature rules pass
/// complements that x alone cannot represent).  s-derivatives follow by
/// chain rule (d/ds = x(1-x) d/dx).
struct ScalarField {
    std::function<double(double, double)> f, fx, fxx;
    /// optional direct second s-derivative; the chain-rule fallback squares
    /// x(1-x) and can underflow at extreme depth on conical closed forms
    std::function<double(double, double)> ss;
    /// optional direct third s-derivative (exact path-integral Ricci terms)
    std::function<double(double, double)> sss;

    double value(double x) const { return f(x, 1.0 - x); }
    double value(double x, double xc) const { return f(x, xc); }
    double d_s(double x, double xc) const { return x * xc * fx(x, xc); }
    double d_s(double x) const { return d_s(x, 1.0 - x); }
    double d_ss(double x, double xc) const {
        if (ss) return ss(x, xc);
        const double c = x * xc;
        return c * ((xc - x) * fx(x, xc) + c * fxx(x, xc));
    }
    double d_ss(double x) const { return d_ss(x, 1.0 - x); }
};

/// How the additive constant of a potential was fixed.
enum class Normalization {
    None,
    ZeroMean,        // sum_i phi_i = 0 on the grid
    ZeroMeanSelf,    // int phi omega_phi = 0
    PathContinuous,  // int (phi - phi_ref) omega_phi = 0: the t->0+ path limit
    UnitMass,   // int e^{-beta phi}(|S|^2+eps)^{-(1-beta)} omega0 = int omega0
};
const char* to_string(Normalization n);

/// Kahler potential phi with the derived convex potential v = u0 + phi and its
/// first two s-derivatives on the grid.  `analytic` carries an evaluator for
/// off-grid quadrature; grid-backed profiles get a local-cubic interpolant.
struct PotentialProfile {
    std::vector<double> phi;
    std::vector<double> v, v_prime, v_second;
    Normalization normalization = Normalization::None;
    std::shared_ptr<const ScalarField> analytic;   // the potential phi itself
    double cone_exponent_0 = 1.0;  // metric growth rate at x->0 (1 = smooth)
    double cone_exponent_1 = 1.0;

    /// phi extrapolated to the poles (quartic extrapolation when grid-backed).
    double pole_value(const RadialGrid& g, int side) const;
};

/// Build a profile from a closed-form potential field.
PotentialProfile make_potential(const RadialGrid& g, const BackgroundGeometry& bg,
                                const ScalarField& phi, Normalization tag,
                                double cone0 = 1.0, double cone1 = 1.0);

/// Build a profile from grid samples of phi (derivatives by 4th-order FD).
PotentialProfile make_potential_from_grid(const RadialGrid& g, const BackgroundGeometry& bg,
                                          std::vector<double> phi, Normalization tag);

/// Interpolating field over grid samples (local cubic; derivative arrays
/// interpolated alongside).  Used for off-grid evaluation of solver output.
ScalarField grid_field(const RadialGrid& g, std::vector<double> f);

/// Checks the PotentialProfile invariants (v'' > 0, v' monotone 0 -> 2,
/// total mass 2).  Throws std::domain_error on violation.
void validate_profile(const RadialGrid& g, const PotentialProfile& p, double mass_tol = 1e-6);

/// Metric coefficient samples m = v''(s); the Riemannian metric of omega_phi
/// is 2 m |dz|^2/|z|^2 and its area is 2 pi int m ds.
struct ConeFit {
    double exponent = 1.0;   // fitted growth rate of m ~ e^{-p|s|}
    double ratio_lo = 0.0;   // inf over the window of m e^{+claim |s|}
    double ratio_hi = 0.0;   // sup over the window
};

struct MetricProfile {
    std::vector<double> m;
    std::vector<double> v_prime;  // moment coordinates tau_i when available
    ConeFit fit0, fit1;           // x -> 0 and x -> 1 ends
    std::shared_ptr<const ScalarField> analytic_potential;
};

MetricProfile metric_of(const RadialGrid& g, const PotentialProfile& p);
MetricProfile make_metric(const RadialGrid& g, std::vector<double> m);  // fits its own ends
double metric_area(const RadialGrid& g, const MetricProfile& m);  // 2 pi int m ds

/// Positive volume-form coefficient f(s) with per-cell masses.  node_values
/// are pointwise f(s_i); cell_mass[i] = int_{cell i} f ds, integrated with
/// graded panels so boundary layers below the grid scale keep exact mass.
struct Density {
    std::vector<double> node_values;
    std::vector<double> cell_mass;
    std::function<double(double)> dx_density;  // f(s(x))/(x(1-x)), closed form

    double mass_s() const;             // int f ds
    double mass() const;               // 2 pi int f ds (4 pi for unit-class)
};

Density make_density(const RadialGrid& g, std::function<double(double)> dx_density);

/// Closed-form conical Kahler-Einstein metric on P^1 with cone angle
/// 2 pi beta at both poles:  v_beta(s) = (2/beta) log(1+e^{beta s}).
/// `phi` stores the raw difference v_beta - u0; adding normalization_shift
/// (= -log(beta)/beta) makes the Monge-Ampere oracle equation hold with
/// normalizing constant exactly 1.
struct FootballOracle {
    double beta = 1.0;
    double normalization_shift = 0.0;
    double diameter_exact = 0.0;      // pi/sqrt(beta)
    std::vector<double> phi;          // raw phi on the grid
    std::vector<double> v_second;     // 2 beta y(1-y)

    static double y_of(double x, double xc, double beta);        // e^{beta s}/(1+e^{beta s})
    static double v_second_at(double x, double xc, double beta); // 2 beta y (1-y)
    static double phi_raw_at(double x, double xc, double beta);  // v_beta - u0

    /// Mass-normalized potential (the oracle equation holds with constant 1).
    PotentialProfile normalized_profile(const RadialGrid& g, const BackgroundGeometry& bg) const;
    ScalarField normalized_field() const;

    /// Max-norm residual of v'' = e^{-beta phi} |S|^{-2(1-beta)} u0'' over the grid.
    double einstein_residual(const RadialGrid& g) const;
};

FootballOracle football_potential(double beta, const RadialGrid& g);

/// r(s) = -(log m)''(s); Ric(omega) >= c omega iff r >= c m pointwise.
std::vector<double> ricci_coefficient(const RadialGrid& g, const std::vector<double>& m);

/// Cone-model asymptotics: template fit of the growth exponent on each end
/// plus two-sided ratio bounds against the claimed exponent over the outer
/// decile of the grid.
struct AsymptoticsReport {
    double claimed = 1.0;
    ConeFit fit0, fit1;
    bool conical = false;   // verdict: ratio bounds finite and away from 0
};

AsymptoticsReport cone_asymptotics_check(const RadialGrid& g, const std::vector<double>& m,
                                         double beta_claim);

/// ratio = v''/u0'' on the grid.
std::vector<double> volume_ratio(const RadialGrid& g, const PotentialProfile& p,
                                 const BackgroundGeometry& bg);

/// (int |ratio|^p u0'' ds / int u0'' ds)^{1/p} over grid samples.
double lp_norm(const RadialGrid& g, const std::vector<double>& ratio, double p);

/// Same norm for a closed-form ratio (tanh-sinh; handles x^{p-1} tails).
double lp_norm_field(const std::function<double(double, double)>& ratio, double p);

/// Seeded family of smooth closed-form test potentials (Gaussian bumps plus a
/// pole-to-pole step), scaled to keep omega_phi positive.
std::vector<ScalarField> random_potential_family(int count, double amplitude, std::uint64_t seed);

/// The fixed smooth compactly-supported bump used by manufactured solutions.
ScalarField manufactured_bump(double amplitude = 0.1, double center = 0.4, double width = 0.25);

} // namespace ckelab

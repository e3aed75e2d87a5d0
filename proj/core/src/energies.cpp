#include "ckelab/energies.hpp"

#include "ckelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckelab {

namespace {

const ScalarField& field_of(const PotentialProfile& p) {
    if (!p.analytic)
        throw std::invalid_argument("energy functional: potential needs an evaluator");
    return *p.analytic;
}

// every omega_t along the built-in paths is a convex mix of omega_0 and
// omega_phi, so endpoint positivity certifies the whole family
void require_kahler(const ScalarField& phi) {
    for (int i = 1; i < 256; ++i) {
        const double x = i / 256.0;
        if (!(2.0 * x * (1.0 - x) + phi.d_ss(x) > 0.0))
            throw std::domain_error("energy functional: path leaves the Kahler cone");
    }
}

// Potentials whose metric dips close to zero push complex zeros of w toward
// the contour, so the energy rule runs at half the default step.
const TanhSinhRule& rule_for(EnergyRule q) {
    if (q == EnergyRule::Fine) return TanhSinhRule::get(0.0125, 6.2);
    return TanhSinhRule::get(0.06, 5.2);
}

double sigma(PathRule r, double t) { return r == PathRule::Linear ? t : t * t; }
double sigma_dot(PathRule r, double t) { return r == PathRule::Linear ? 1.0 : 2.0 * t; }

double w_sigma(const ScalarField& phi, double x, double xc, double sig) {
    return 2.0 * x * xc + sig * phi.d_ss(x, xc);
}

// d/ds of phi_ss by Richardson-extrapolated central differences (order 6).
// Differencing the exact evaluator (rather than log of the metric mix) keeps
// the noise relative to the local scale, so the full-depth rule stays clean.
double phi_sss(const ScalarField& phi, double x, double xc) {
    if (phi.sss) return phi.sss(x, xc);
    constexpr double ds = 0.01;
    const double s0 = (x <= xc) ? std::log(x / xc) : -std::log(xc / x);
    auto b = [&](double s) {
        const double xv = 1.0 / (1.0 + std::exp(-s));
        const double xcv = 1.0 / (1.0 + std::exp(s));
        return phi.d_ss(xv, xcv);
    };
    const double b1m = b(s0 - ds), b1p = b(s0 + ds);
    const double b2m = b(s0 - 2 * ds), b2p = b(s0 + 2 * ds);
    const double b4m = b(s0 - 4 * ds), b4p = b(s0 + 4 * ds);
    const double d_h = (b2m - 8.0 * b1m + 8.0 * b1p - b2p) / (12.0 * ds);
    const double d_2h = (b4m - 8.0 * b2m + 8.0 * b2p - b4p) / (24.0 * ds);
    return (16.0 * d_h - d_2h) / 15.0;
}

// u0''' = 2 x (1-x) (1 - 2x) in complement form
double u0_sss(double x, double xc) { return 2.0 * x * xc * (xc - x); }

double pole_value(const ScalarField& phi, int side) {
    // deep enough that x^beta Holder tails of conical potentials are below
    // roundoff for every cone angle in use (the complement is passed exactly)
    return side == 0 ? phi.value(1e-60, 1.0) : phi.value(1.0, 1e-60);
}

// I-functional for a given path rule by Gauss quadrature in t.
double i_path(const ScalarField& phi, PathRule rule, int nt, EnergyRule quad) {
    const GaussRule& gr = GaussRule::get(nt);
    const TanhSinhRule& ts = rule_for(quad);
    double acc = 0.0;
    for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
        const double t = 0.5 * (gr.nodes[k] + 1.0);
        const double wt = 0.5 * gr.weights[k];
        const double sig = sigma(rule, t);
        const double sd = sigma_dot(rule, t);
        const double inner = ts.integrate([&](double x, double xc) {
            return phi.value(x, xc) * w_sigma(phi, x, xc, sig) / (x * xc);
        });
        acc += wt * sd * inner;
    }
    return 2.0 * M_PI * acc;
}

double grad_square_integral(const ScalarField& phi) {
    // x(1-x) fx^2 assembled as (x(1-x) fx) * fx; squaring fx first can
    // overflow where the gradient is large but the measure is tiny
    return integrate_01(
        [&](double x, double xc) { return phi.d_s(x, xc) * phi.fx(x, xc); });
}

} // namespace

// Path-integral K-energy at the current level.  Integrating the Ricci term
// by parts in s turns int phidot Ric(omega_t) into a first-derivative bulk
// integral plus pole boundary terms; the boundary cone exponents cancel
// exactly against the conical Ricci point masses, leaving
//   E = -2 pi (phi(0) + phi(inf))
//       - 2 pi int_0^1 sigmadot [ int (phi_s w'/w - phi w) ds ] dt .
double k_energy_path(const PotentialProfile& p, PathRule rule, int nt, EnergyRule quad) {
    const ScalarField& phi = field_of(p);
    require_kahler(phi);
    const GaussRule& gr = GaussRule::get(nt);
    const TanhSinhRule& ts = rule_for(quad);
    double acc = 0.0;
    for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
        const double t = 0.5 * (gr.nodes[k] + 1.0);
        const double wt = 0.5 * gr.weights[k];
        const double sig = sigma(rule, t);
        const double sd = sigma_dot(rule, t);
        const double inner = ts.integrate([&](double x, double xc) {
            const double w = w_sigma(phi, x, xc, sig);
            const double wp = u0_sss(x, xc) + sig * phi_sss(phi, x, xc);
            return (phi.d_s(x, xc) * wp / w - phi.value(x, xc) * w) / (x * xc);
        });
        acc += wt * sd * inner;
    }
    return -2.0 * M_PI * (pole_value(phi, 0) + pole_value(phi, 1)) - 2.0 * M_PI * acc;
}

double k_energy_closed(const PotentialProfile& p, EntropyVariant variant) {
    const ScalarField& phi = field_of(p);
    double ent;
    if (variant == EntropyVariant::AgainstOmega0) {
        ent = integrate_01([&](double x, double xc) {
            return 2.0 * std::log(w_sigma(phi, x, xc, 1.0) / (2.0 * x * xc));
        });
    } else {
        ent = integrate_01([&](double x, double xc) {
            const double w = w_sigma(phi, x, xc, 1.0);
            return std::log(w / (2.0 * x * xc)) * w / (x * xc);
        });
    }
    // I + Q collapses to -1/2 int x(1-x) phi_x^2 dx for any path rule
    const double ipq = -0.5 * grad_square_integral(phi);
    return 2.0 * M_PI * (ent + ipq);
}

double i_functional(const PotentialProfile& p) {
    const ScalarField& phi = field_of(p);
    const double a = integrate_01([&](double x, double xc) { return 2.0 * phi.value(x, xc); });
    return 2.0 * M_PI * a - M_PI * grad_square_integral(phi);
}

double q_functional(const PotentialProfile& p) {
    const ScalarField& phi = field_of(p);
    const double a = integrate_01([&](double x, double xc) { return 2.0 * phi.value(x, xc); });
    return -2.0 * M_PI * a;
}

double j_chi_eps_path(const PotentialProfile& p, double epsilon, PathRule rule, int nt,
                      EnergyRule quad) {
    const ScalarField& phi = field_of(p);
    require_kahler(phi);
    const GaussRule& gr = GaussRule::get(nt);
    const TanhSinhRule& ts = rule_for(quad);
    double acc = 0.0;
    for (std::size_t k = 0; k < gr.nodes.size(); ++k) {
        const double t = 0.5 * (gr.nodes[k] + 1.0);
        const double wt = 0.5 * gr.weights[k];
        const double sig = sigma(rule, t);
        const double sd = sigma_dot(rule, t);
        const double inner = ts.integrate([&](double x, double xc) {
            const double chi = TwistingProfile::chi_dens(x, xc, epsilon);
            const double w = w_sigma(phi, x, xc, sig) / (x * xc);
            return phi.value(x, xc) * (chi - w);
        });
        acc += wt * sd * inner;
    }
    return 2.0 * M_PI * acc;
}

double j_chi_eps_closed(const PotentialProfile& p, double epsilon) {
    const ScalarField& phi = field_of(p);
    const double main = integrate_01([&](double x, double xc) {
        return std::log(x * xc + epsilon) * phi.d_ss(x, xc) / (x * xc);
    });
    return 2.0 * M_PI * (main + 0.5 * grad_square_integral(phi));
}

double j_chi(const PotentialProfile& p, PathRule rule, int nt, EnergyRule quad) {
    const ScalarField& phi = field_of(p);
    const double p0 = pole_value(phi, 0);
    const double p1 = pole_value(phi, 1);
    if (!std::isfinite(p0) || !std::isfinite(p1))
        throw std::domain_error("j_chi: potential has divergent pole limits");
    return 2.0 * M_PI * (p0 + p1) - i_path(phi, rule, nt, quad);
}

double j_chi_closed(const PotentialProfile& p) {
    const ScalarField& phi = field_of(p);
    const double main = integrate_01([&](double x, double xc) {
        return (std::log(x) + std::log(xc)) * phi.d_ss(x, xc) / (x * xc);
    });
    return 2.0 * M_PI * (main + 0.5 * grad_square_integral(phi));
}

double j0(const PotentialProfile& p) {
    return 2.0 * M_PI * grad_square_integral(field_of(p));
}

TwistedEnergies twisted_energies(const PotentialProfile& p, double epsilon, double beta,
                                 int nt, EnergyRule quad) {
    TwistedEnergies out;
    out.E = k_energy_path(p, PathRule::Linear, nt, quad);
    out.J_eps = j_chi_eps_path(p, epsilon, PathRule::Linear, nt, quad);
    out.J_lim = j_chi(p, PathRule::Linear, nt, quad);
    out.eps_energy = out.E + (1.0 - beta) * out.J_eps;
    out.limit_energy = out.E + (1.0 - beta) * out.J_lim;
    return out;
}

double regularization_gap_constant() {
    static const double value = 4.0 * M_PI * integrate_01([](double x, double xc) {
        return std::log1p(1.0 / (x * xc));
    });
    return value;
}

EnergyReport energy_report(const PotentialProfile& p, double epsilon, double beta, int nt) {
    EnergyReport r;
    r.E_path = k_energy_path(p, PathRule::Linear, nt);
    r.E_closed_variant_a = k_energy_closed(p, EntropyVariant::AgainstOmega0);
    r.E_closed_variant_b = k_energy_closed(p, EntropyVariant::AgainstOmegaPhi);
    r.I = i_functional(p);
    r.Q = q_functional(p);
    r.J_chi_eps_path = j_chi_eps_path(p, epsilon, PathRule::Linear, nt);
    r.J_chi_eps_closed = j_chi_eps_closed(p, epsilon);
    r.J_chi = j_chi(p, PathRule::Linear, nt);
    r.J_chi_closed = j_chi_closed(p);
    r.J0 = j0(p);
    r.twisted_eps = r.E_path + (1.0 - beta) * r.J_chi_eps_path;
    r.twisted_limit = r.E_path + (1.0 - beta) * r.J_chi;
    r.c3_estimate = regularization_gap_constant();
    r.c6_estimate = std::abs(r.twisted_eps);
    return r;
}

PropernessScan properness_scan(const std::vector<PotentialProfile>& family, double beta,
                               int nt) {
    PropernessScan scan;
    scan.points.reserve(family.size());
    for (const auto& p : family) {
        const double j = j0(p);
        const double e = k_energy_path(p, PathRule::Linear, nt) +
                         (1.0 - beta) * j_chi(p, PathRule::Linear, nt);
        scan.points.emplace_back(j, e);
    }
    // least-squares slope of E against J0, halved for slack, as the envelope
    double mj = 0.0, me = 0.0;
    for (const auto& q : scan.points) {
        mj += q.first;
        me += q.second;
    }
    mj /= scan.points.size();
    me /= scan.points.size();
    double num = 0.0, den = 0.0;
    for (const auto& q : scan.points) {
        num += (q.first - mj) * (q.second - me);
        den += (q.first - mj) * (q.first - mj);
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    scan.c4 = std::max(0.05, 0.5 * slope);
    scan.c5 = 0.0;
    for (const auto& q : scan.points)
        scan.c5 = std::max(scan.c5, scan.c4 * q.first - q.second);
    return scan;
}

MonotonicityCertificate monotonicity_check(const std::vector<double>& trace, double rel_tol) {
    MonotonicityCertificate cert;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const double tol = rel_tol * (1.0 + std::abs(trace[k]));
        const double inc = trace[k + 1] - trace[k];
        cert.max_increase = std::max(cert.max_increase, inc - tol);
        if (inc > tol) {
            cert.monotone = false;
            cert.violations.push_back(static_cast<int>(k));
        }
    }
    return cert;
}

} // namespace ckelab

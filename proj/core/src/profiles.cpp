#include "ckelab/profiles.hpp"

#include "ckelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ckelab {

const char* to_string(Normalization n) {
    switch (n) {
        case Normalization::None: return "none";
        case Normalization::ZeroMean: return "zero-mean";
        case Normalization::ZeroMeanSelf: return "zero-mean-self";
        case Normalization::PathContinuous: return "path-continuous";
        case Normalization::UnitMass: return "unit-mass";
    }
    return "?";
}

double PotentialProfile::pole_value(const RadialGrid& g, int side) const {
    if (analytic)
        return side == 0 ? analytic->value(1e-60, 1.0) : analytic->value(1.0, 1e-60);
    // quartic extrapolation from the five outermost nodes
    const int n = g.n;
    std::vector<double> nodes(5), vals(5);
    for (int j = 0; j < 5; ++j) {
        const int idx = (side == 0) ? j : n - 5 + j;
        nodes[j] = g.x[idx];
        vals[j] = phi[idx];
    }
    const std::vector<double> wts = fd_weights(side == 0 ? 0.0 : 1.0, nodes, 0);
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += wts[j] * vals[j];
    return acc;
}

PotentialProfile make_potential(const RadialGrid& g, const BackgroundGeometry& bg,
                                const ScalarField& phi, Normalization tag,
                                double cone0, double cone1) {
    PotentialProfile p;
    const int n = g.n;
    p.phi.resize(n);
    p.v.resize(n);
    p.v_prime.resize(n);
    p.v_second.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.x[i];
        p.phi[i] = phi.value(x);
        p.v[i] = bg.u0_vals[i] + p.phi[i];
        p.v_prime[i] = BackgroundGeometry::u0_s(x) + phi.d_s(x);
        p.v_second[i] = bg.u0pp_vals[i] + phi.d_ss(x);
    }
    p.normalization = tag;
    p.analytic = std::make_shared<ScalarField>(phi);
    p.cone_exponent_0 = cone0;
    p.cone_exponent_1 = cone1;
    return p;
}

PotentialProfile make_potential_from_grid(const RadialGrid& g, const BackgroundGeometry& bg,
                                          std::vector<double> phi, Normalization tag) {
    PotentialProfile p;
    const int n = g.n;
    p.phi = std::move(phi);
    const std::vector<double> dss = deriv_ss(g, p.phi);
    const std::vector<double> ds = deriv_s(g, p.phi);
    p.v.resize(n);
    p.v_prime.resize(n);
    p.v_second.resize(n);
    for (int i = 0; i < n; ++i) {
        p.v[i] = bg.u0_vals[i] + p.phi[i];
        p.v_prime[i] = BackgroundGeometry::u0_s(g.x[i]) + ds[i];
        p.v_second[i] = bg.u0pp_vals[i] + dss[i];
    }
    p.normalization = tag;
    p.analytic = std::make_shared<ScalarField>(grid_field(g, p.phi));
    return p;
}

ScalarField grid_field(const RadialGrid& g, std::vector<double> f) {
    auto fx = std::make_shared<std::vector<double>>(deriv_x(g, f));
    auto fxx = std::make_shared<std::vector<double>>(deriv_xx(g, f));
    auto fv = std::make_shared<std::vector<double>>(std::move(f));
    const int n = g.n;
    const double h = g.h;
    // local quartic Lagrange over the 5 nearest midpoint nodes; clamped to the
    // node range (grid data carries no information below the first cell)
    auto interp = [n, h](const std::shared_ptr<std::vector<double>>& arr, double x) {
        x = std::clamp(x, 0.0, 1.0);
        int i0 = static_cast<int>(std::floor(x / h - 0.5)) - 2;
        i0 = std::clamp(i0, 0, n - 5);
        double acc = 0.0;
        for (int a = 0; a < 5; ++a) {
            double l = 1.0;
            const double xa = (i0 + a + 0.5) * h;
            for (int b = 0; b < 5; ++b) {
                if (a == b) continue;
                const double xb = (i0 + b + 0.5) * h;
                l *= (x - xb) / (xa - xb);
            }
            acc += l * (*arr)[i0 + a];
        }
        return acc;
    };
    ScalarField out;
    out.f = [interp, fv](double x, double) { return interp(fv, x); };
    out.fx = [interp, fx](double x, double) { return interp(fx, x); };
    out.fxx = [interp, fxx](double x, double) { return interp(fxx, x); };
    return out;
}

void validate_profile(const RadialGrid& g, const PotentialProfile& p, double mass_tol) {
    for (int i = 0; i < g.n; ++i)
        if (!(p.v_second[i] > 0.0))
            throw std::domain_error("PotentialProfile: v'' must be positive");
    // grid quadrature certifies smooth profiles (midpoint superconvergence);
    // the evaluator route certifies conical ones whose grid mass undershoots
    double grid_mass = 0.0;
    for (int i = 0; i < g.n; ++i) grid_mass += g.w[i] * p.v_second[i];
    bool ok = std::abs(grid_mass - 2.0) <= mass_tol * 2.0;
    if (!ok && p.analytic && p.analytic->ss) {
        const ScalarField phi = *p.analytic;
        const double mass = integrate_01(
            [&phi](double x, double xc) { return 2.0 + phi.d_ss(x, xc) / (x * xc); });
        ok = std::abs(mass - 2.0) <= mass_tol * 2.0;
    }
    if (!ok)
        throw std::domain_error("PotentialProfile: total mass of v'' is not 2");
    for (int i = 1; i < g.n; ++i)
        if (p.v_prime[i] < p.v_prime[i - 1] - 1e-9)
            throw std::domain_error("PotentialProfile: v' must be nondecreasing");
}

namespace {

// Least-squares template fit of log m = c + p s - 2 log(1+e^{p s}) over a
// window of (s, m) samples; exact for footballs of any angle.  `sign` flips
// s for the x -> 1 end.
double template_exponent_fit(const std::vector<double>& sv, const std::vector<double>& lm,
                             double sign) {
    auto sse = [&](double p) {
        double mean = 0.0;
        const int n = static_cast<int>(sv.size());
        std::vector<double> r(n);
        for (int i = 0; i < n; ++i) {
            const double ps = p * sign * sv[i];
            r[i] = lm[i] - (ps - 2.0 * std::log1p(std::exp(ps)));
            mean += r[i];
        }
        mean /= n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += (r[i] - mean) * (r[i] - mean);
        return acc;
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.02, b = 1.6;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sse(c), fd = sse(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a); fc = sse(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a); fd = sse(d);
        }
    }
    return 0.5 * (a + b);
}

ConeFit fit_end(const RadialGrid& g, const std::vector<double>& m, int side, double claim) {
    const int n = g.n;
    const int win = std::max(8, n / 10);
    std::vector<double> sv, lm;
    sv.reserve(win);
    lm.reserve(win);
    for (int j = 0; j < win; ++j) {
        const int idx = (side == 0) ? j : n - 1 - j;
        sv.push_back(g.s[idx]);
        lm.push_back(std::log(m[idx]));
    }
    ConeFit fit;
    fit.exponent = template_exponent_fit(sv, lm, side == 0 ? 1.0 : -1.0);
    fit.ratio_lo = std::numeric_limits<double>::infinity();
    fit.ratio_hi = 0.0;
    for (std::size_t j = 0; j < sv.size(); ++j) {
        const double ratio = std::exp(lm[j] + claim * std::abs(sv[j]));
        fit.ratio_lo = std::min(fit.ratio_lo, ratio);
        fit.ratio_hi = std::max(fit.ratio_hi, ratio);
    }
    return fit;
}

} // namespace

MetricProfile metric_of(const RadialGrid& g, const PotentialProfile& p) {
    MetricProfile mp;
    mp.m = p.v_second;
    mp.v_prime = p.v_prime;
    mp.fit0 = fit_end(g, mp.m, 0, p.cone_exponent_0);
    mp.fit1 = fit_end(g, mp.m, 1, p.cone_exponent_1);
    mp.analytic_potential = p.analytic;
    return mp;
}

MetricProfile make_metric(const RadialGrid& g, std::vector<double> m) {
    MetricProfile mp;
    mp.m = std::move(m);
    // fit exponents first, then rate the ratio window against them
    const double p0 = fit_end(g, mp.m, 0, 1.0).exponent;
    const double p1 = fit_end(g, mp.m, 1, 1.0).exponent;
    mp.fit0 = fit_end(g, mp.m, 0, p0);
    mp.fit1 = fit_end(g, mp.m, 1, p1);
    return mp;
}

double metric_area(const RadialGrid& g, const MetricProfile& m) {
    if (m.analytic_potential) {
        const ScalarField phi = *m.analytic_potential;
        return 2.0 * M_PI * integrate_01([&phi](double x, double xc) {
                   return 2.0 + phi.d_ss(x, xc) / (x * xc);
               });
    }
    // grid sum with fitted power-law replacements for the outer cells
    const int K = std::min(16, g.n / 8);
    double acc = 0.0;
    for (int i = K; i < g.n - K; ++i) acc += g.w[i] * m.m[i];
    const double face0 = g.face(K);
    acc += (m.m[K] / std::pow(g.x[K], m.fit0.exponent)) *
           std::pow(face0, m.fit0.exponent) / m.fit0.exponent;
    const double face1 = g.face(g.n - K);
    acc += (m.m[g.n - 1 - K] / std::pow(1.0 - g.x[g.n - 1 - K], m.fit1.exponent)) *
           std::pow(1.0 - face1, m.fit1.exponent) / m.fit1.exponent;
    return 2.0 * M_PI * acc;
}

double Density::mass_s() const {
    double acc = 0.0;
    for (double c : cell_mass) acc += c;
    return acc;
}

double Density::mass() const { return 2.0 * M_PI * mass_s(); }

Density make_density(const RadialGrid& g, std::function<double(double)> dx_density) {
    Density d;
    d.dx_density = std::move(dx_density);
    d.node_values.resize(g.n);
    d.cell_mass.resize(g.n);
    const GradedPanels& panels = default_panels();
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        d.node_values[i] = d.dx_density(x) * x * (1.0 - x);
        d.cell_mass[i] = panels.integrate(d.dx_density, g.face(i), g.face(i + 1));
    }
    return d;
}

double FootballOracle::y_of(double x, double xc, double beta) {
    if (x <= 0.5) {
        const double qb = std::pow(x / xc, beta);
        return qb / (1.0 + qb);
    }
    const double qmb = std::pow(xc / x, beta);
    return 1.0 / (1.0 + qmb);
}

double FootballOracle::v_second_at(double x, double xc, double beta) {
    const double y = y_of(x, xc, beta);
    const double ycomp = y_of(xc, x, beta);  // 1 - y, stable at both ends
    return 2.0 * beta * y * ycomp;
}

double FootballOracle::phi_raw_at(double x, double xc, double beta) {
    if (x <= 0.5) {
        const double q = x / xc;
        return (2.0 / beta) * std::log1p(std::pow(q, beta)) - 2.0 * std::log1p(q);
    }
    const double q = xc / x;
    return (2.0 / beta) * std::log1p(std::pow(q, beta)) - 2.0 * std::log1p(q);
}

FootballOracle football_potential(double beta, const RadialGrid& g) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("football_potential: beta must lie in (0,1]");
    FootballOracle oc;
    oc.beta = beta;
    oc.normalization_shift = -std::log(beta) / beta;
    oc.diameter_exact = M_PI / std::sqrt(beta);
    oc.phi.resize(g.n);
    oc.v_second.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        oc.phi[i] = FootballOracle::phi_raw_at(x, 1.0 - x, beta);
        oc.v_second[i] = FootballOracle::v_second_at(x, 1.0 - x, beta);
    }
    return oc;
}

ScalarField FootballOracle::normalized_field() const {
    const double b = beta;
    const double shift = normalization_shift;
    ScalarField f;
    f.f = [b, shift](double x, double xc) { return phi_raw_at(x, xc, b) + shift; };
    // (y - x) loses precision at the right pole; xc - ycomp is the same
    // quantity assembled from complements
    auto ydiff = [b](double x, double xc) {
        if (x <= 0.5) return y_of(x, xc, b) - x;
        return xc - y_of(xc, x, b);
    };
    f.fx = [b, ydiff](double x, double xc) { return 2.0 * ydiff(x, xc) / (x * xc); };
    f.fxx = [b, ydiff](double x, double xc) {
        const double c = x * xc;
        const double y = y_of(x, xc, b);
        const double ycomp = y_of(xc, x, b);
        const double yx = b * y * ycomp / c;
        return 2.0 * ((yx - 1.0) * c - ydiff(x, xc) * (xc - x)) / (c * c);
    };
    // exact second and third s-derivatives, stable at any depth
    f.ss = [b](double x, double xc) {
        const double y = y_of(x, xc, b);
        const double ycomp = y_of(xc, x, b);
        return 2.0 * b * y * ycomp - 2.0 * x * xc;
    };
    f.sss = [b](double x, double xc) {
        const double y = y_of(x, xc, b);
        const double ycomp = y_of(xc, x, b);
        return 2.0 * b * b * y * ycomp * (ycomp - y) - 2.0 * x * xc * (xc - x);
    };
    return f;
}

PotentialProfile FootballOracle::normalized_profile(const RadialGrid& g,
                                                    const BackgroundGeometry& bg) const {
    return make_potential(g, bg, normalized_field(), Normalization::UnitMass, beta, beta);
}

double FootballOracle::einstein_residual(const RadialGrid& g) const {
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        const double phin = phi[i] + normalization_shift;
        const double rhs = std::exp(-beta * phin + BackgroundGeometry::ricci_potential(x)) *
                           std::pow(BackgroundGeometry::divisor_norm(x), beta - 1.0) *
                           BackgroundGeometry::u0_ss(x);
        worst = std::max(worst, std::abs(v_second[i] - rhs));
    }
    return worst;
}

std::vector<double> ricci_coefficient(const RadialGrid& g, const std::vector<double>& m) {
    std::vector<double> lm(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (!(m[i] > 0.0))
            throw std::domain_error("ricci_coefficient: metric coefficient must be positive");
        lm[i] = std::log(m[i]);
    }
    std::vector<double> r = deriv_ss(g, lm);
    for (double& v : r) v = -v;
    return r;
}

AsymptoticsReport cone_asymptotics_check(const RadialGrid& g, const std::vector<double>& m,
                                         double beta_claim) {
    AsymptoticsReport rep;
    rep.claimed = beta_claim;
    rep.fit0 = fit_end(g, m, 0, beta_claim);
    rep.fit1 = fit_end(g, m, 1, beta_claim);
    auto ok = [](const ConeFit& f) {
        return std::isfinite(f.ratio_hi) && f.ratio_lo > 1e-8 &&
               f.ratio_hi / f.ratio_lo <= 4.0;
    };
    rep.conical = ok(rep.fit0) && ok(rep.fit1);
    return rep;
}

std::vector<double> volume_ratio(const RadialGrid& g, const PotentialProfile& p,
                                 const BackgroundGeometry& bg) {
    std::vector<double> r(g.n);
    for (int i = 0; i < g.n; ++i) r[i] = p.v_second[i] / bg.u0pp_vals[i];
    return r;
}

double lp_norm(const RadialGrid& g, const std::vector<double>& ratio, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
    double num = 0.0;
    for (int i = 0; i < g.n; ++i)
        num += g.w[i] * BackgroundGeometry::u0_ss(g.x[i]) * std::pow(std::abs(ratio[i]), p);
    return std::pow(num / 2.0, 1.0 / p);
}

double lp_norm_field(const std::function<double(double, double)>& ratio, double p) {
    if (p < 1.0) throw std::invalid_argument("lp_norm_field: p must be >= 1");
    const double v =
        integrate_01([&](double x, double xc) { return std::pow(std::abs(ratio(x, xc)), p); });
    return std::pow(v, 1.0 / p);
}

namespace {

// third s-derivative by the chain rule from closed x-derivatives
std::function<double(double, double)> chain_sss(const ScalarField& base,
                                                std::function<double(double, double)> fxxx) {
    return [base, fxxx](double x, double xc) {
        const double c = x * xc;
        const double g = (xc - x) * base.fx(x, xc) + c * base.fxx(x, xc);
        const double gx = -2.0 * base.fx(x, xc) + 2.0 * (xc - x) * base.fxx(x, xc) +
                          c * fxxx(x, xc);
        return c * ((xc - x) * g + c * gx);
    };
}

ScalarField gaussian_bump(double a, double c, double w) {
    ScalarField f;
    f.f = [a, c, w](double x, double) {
        const double y = (x - c) / w;
        return a * std::exp(-y * y);
    };
    f.fx = [a, c, w](double x, double) {
        const double y = (x - c) / w;
        return a * std::exp(-y * y) * (-2.0 * y / w);
    };
    f.fxx = [a, c, w](double x, double) {
        const double y = (x - c) / w;
        return a * std::exp(-y * y) * (4.0 * y * y - 2.0) / (w * w);
    };
    f.sss = chain_sss(f, [a, c, w](double x, double) {
        const double y = (x - c) / w;
        return a * std::exp(-y * y) * (12.0 * y - 8.0 * y * y * y) / (w * w * w);
    });
    return f;
}

ScalarField smooth_step(double d) {
    // d * x^2 (3 - 2x): flat at both poles, pole values 0 and d
    ScalarField f;
    f.f = [d](double x, double) { return d * x * x * (3.0 - 2.0 * x); };
    f.fx = [d](double x, double xc) { return d * 6.0 * x * xc; };
    f.fxx = [d](double x, double) { return d * (6.0 - 12.0 * x); };
    f.sss = chain_sss(f, [d](double, double) { return -12.0 * d; });
    return f;
}

ScalarField sum_fields(std::vector<ScalarField> parts) {
    auto p = std::make_shared<std::vector<ScalarField>>(std::move(parts));
    ScalarField f;
    f.f = [p](double x, double xc) {
        double acc = 0.0;
        for (const auto& q : *p) acc += q.f(x, xc);
        return acc;
    };
    f.fx = [p](double x, double xc) {
        double acc = 0.0;
        for (const auto& q : *p) acc += q.fx(x, xc);
        return acc;
    };
    f.fxx = [p](double x, double xc) {
        double acc = 0.0;
        for (const auto& q : *p) acc += q.fxx(x, xc);
        return acc;
    };
    bool all_sss = true;
    for (const auto& q : *p) all_sss = all_sss && static_cast<bool>(q.sss);
    if (all_sss) {
        f.sss = [p](double x, double xc) {
            double acc = 0.0;
            for (const auto& q : *p) acc += q.sss(x, xc);
            return acc;
        };
    }
    return f;
}

ScalarField scale_field(const ScalarField& f, double k) {
    ScalarField g;
    g.f = [f, k](double x, double xc) { return k * f.f(x, xc); };
    g.fx = [f, k](double x, double xc) { return k * f.fx(x, xc); };
    g.fxx = [f, k](double x, double xc) { return k * f.fxx(x, xc); };
    if (f.ss) g.ss = [f, k](double x, double xc) { return k * f.ss(x, xc); };
    if (f.sss) g.sss = [f, k](double x, double xc) { return k * f.sss(x, xc); };
    return g;
}

} // namespace

std::vector<ScalarField> random_potential_family(int count, double amplitude, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<ScalarField> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::vector<ScalarField> parts;
        const int nbump = 2 + static_cast<int>(uni(rng) * 3.0);
        for (int j = 0; j < nbump; ++j) {
            const double a = amplitude * (2.0 * uni(rng) - 1.0);
            const double c = 0.15 + 0.7 * uni(rng);
            const double w = 0.12 + 0.18 * uni(rng);
            parts.push_back(gaussian_bump(a, c, w));
        }
        parts.push_back(smooth_step(amplitude * (2.0 * uni(rng) - 1.0)));
        ScalarField cand = sum_fields(std::move(parts));
        // keep omega_phi strictly positive: scale until v'' >= 0.25 u0''
        double worst = 0.0;
        for (int i = 1; i < 2000; ++i) {
            const double x = i / 2000.0;
            worst = std::min(worst, cand.d_ss(x) / BackgroundGeometry::u0_ss(x));
        }
        double scale = 1.0;
        if (worst < -0.75) scale = 0.75 / (-worst);
        ScalarField scaled = scale_field(cand, scale);
        const double c0 = 0.5 * amplitude * (2.0 * uni(rng) - 1.0);
        ScalarField shifted;
        shifted.f = [scaled, c0](double x, double xc) { return scaled.f(x, xc) + c0; };
        shifted.fx = scaled.fx;
        shifted.fxx = scaled.fxx;
        shifted.ss = scaled.ss;
        shifted.sss = scaled.sss;
        out.push_back(std::move(shifted));
    }
    return out;
}

ScalarField manufactured_bump(double amplitude, double center, double width) {
    ScalarField f;
    auto y_of = [center, width](double x) { return (x - center) / width; };
    f.f = [amplitude, y_of](double x, double) {
        const double y = y_of(x);
        if (std::abs(y) >= 1.0 - 1e-9) return 0.0;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - y * y));
    };
    f.fx = [amplitude, y_of, width](double x, double) {
        const double y = y_of(x);
        if (std::abs(y) >= 1.0 - 1e-9) return 0.0;
        const double t = 1.0 - y * y;
        return amplitude * std::exp(1.0 - 1.0 / t) * (-2.0 * y / (t * t)) / width;
    };
    f.fxx = [amplitude, y_of, width](double x, double) {
        const double y = y_of(x);
        if (std::abs(y) >= 1.0 - 1e-9) return 0.0;
        const double t = 1.0 - y * y;
        const double g = -2.0 * y / (t * t);
        const double gp = -2.0 / (t * t) - 8.0 * y * y / (t * t * t);
        return amplitude * std::exp(1.0 - 1.0 / t) * (g * g + gp) / (width * width);
    };
    return f;
}

} // namespace ckelab

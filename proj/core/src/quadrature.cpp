#include "ckelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ckelab {

namespace {

// Newton iteration on Legendre polynomials.
GaussRule compute_gauss(int order) {
    GaussRule r;
    r.nodes.resize(order);
    r.weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        r.nodes[i] = -z;
        r.nodes[order - 1 - i] = z;
        r.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.weights[order - 1 - i] = r.weights[i];
    }
    return r;
}

} // namespace

const GaussRule& GaussRule::get(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss(order)).first;
    return it->second;
}

double GaussRule::apply(const Real1D& f, double a, double b) const {
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += weights[i] * f(c + r * nodes[i]);
    return acc * r;
}

GradedPanels GradedPanels::make(double floor_width, double ratio, int middle_panels,
                                int gauss_order) {
    if (floor_width <= 0.0 || ratio <= 1.0)
        throw std::invalid_argument("GradedPanels: bad parameters");
    GradedPanels p;
    p.gauss_order = gauss_order;
    std::vector<double> left;
    double edge = 0.25;
    while (edge > floor_width) {
        left.push_back(edge);
        edge /= ratio;
    }
    std::vector<double>& b = p.breakpoints;
    b.push_back(0.0);
    for (auto it = left.rbegin(); it != left.rend(); ++it) b.push_back(*it);
    const double mid_w = 0.5 / middle_panels;
    for (int i = 1; i < middle_panels; ++i) b.push_back(0.25 + i * mid_w);
    for (double v : left) b.push_back(1.0 - v);
    b.push_back(1.0);
    return p;
}

double GradedPanels::integrate(const Real1D& f) const {
    const GaussRule& g = GaussRule::get(gauss_order);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
        acc += g.apply(f, breakpoints[k], breakpoints[k + 1]);
    return acc;
}

double GradedPanels::integrate(const Real1D& f, double a, double b) const {
    if (!(a < b)) return 0.0;
    const GaussRule& g = GaussRule::get(gauss_order);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        const double lo = std::max(a, breakpoints[k]);
        const double hi = std::min(b, breakpoints[k + 1]);
        if (lo < hi) acc += g.apply(f, lo, hi);
    }
    return acc;
}

const GradedPanels& default_panels() {
    static const GradedPanels p = GradedPanels::make();
    return p;
}

const TanhSinhRule& TanhSinhRule::get(double step, double t_max) {
    static std::map<std::pair<double, double>, TanhSinhRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(step, t_max);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    TanhSinhRule r;
    const int m = static_cast<int>(t_max / step);
    for (int k = -m; k <= m; ++k) {
        const double t = k * step;
        const double u = 0.5 * M_PI * std::sinh(t);
        // x = sigma(2u), 1-x = sigma(-2u), both exact logistic forms
        const double xv = 1.0 / (1.0 + std::exp(-2.0 * u));
        const double xcv = 1.0 / (1.0 + std::exp(2.0 * u));
        const double dx = M_PI * std::cosh(t) * xv * xcv;  // dx/dt
        if (dx < 1e-320) continue;
        r.x.push_back(xv);
        r.xc.push_back(xcv);
        r.w.push_back(step * dx);
    }
    return cache.emplace(key, std::move(r)).first->second;
}

double TanhSinhRule::integrate(const Real2D& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * f(x[i], xc[i]);
    return acc;
}

double integrate_01(const Real2D& f) { return TanhSinhRule::get().integrate(f); }

CumulativeIntegral::CumulativeIntegral(Real1D density, const GradedPanels& panels)
    : density_(std::move(density)), edges_(panels.breakpoints), gauss_order_(panels.gauss_order) {
    const GaussRule& g = GaussRule::get(gauss_order_);
    prefix_.resize(edges_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k)
        prefix_[k + 1] = prefix_[k] + g.apply(density_, edges_[k], edges_[k + 1]);
}

double CumulativeIntegral::operator()(double x) const {
    if (x <= edges_.front()) return 0.0;
    if (x >= edges_.back()) return prefix_.back();
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
    const GaussRule& g = GaussRule::get(gauss_order_);
    return prefix_[k] + g.apply(density_, edges_[k], x);
}

} // namespace ckelab

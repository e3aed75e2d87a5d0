#include "ckelab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ckelab {

double s_of_x(double x) { return std::log(x / (1.0 - x)); }
double x_of_s(double s) { return 1.0 / (1.0 + std::exp(-s)); }

RadialGrid RadialGrid::make(int node_count) {
    if (node_count < 16)
        throw std::invalid_argument("RadialGrid: node_count must be >= 16");
    RadialGrid g;
    g.n = node_count;
    g.h = 1.0 / static_cast<double>(node_count);
    g.x.resize(node_count);
    g.s.resize(node_count);
    g.w.resize(node_count);
    for (int i = 0; i < node_count; ++i) {
        const double xi = (i + 0.5) * g.h;
        g.x[i] = xi;
        g.s[i] = s_of_x(xi);
        g.w[i] = g.h / (xi * (1.0 - xi));
    }
    return g;
}

double RadialGrid::integrate_s(const std::vector<double>& g) const {
    if (static_cast<int>(g.size()) != n)
        throw std::invalid_argument("integrate_s: size mismatch");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += w[i] * g[i];
    return acc;
}

std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int m) {
    const int n = static_cast<int>(nodes.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = c[i][m];
    return out;
}

namespace {

// Apply a 5-node derivative stencil bank: central order-4 in the interior,
// one-sided at the first/last two nodes.
std::vector<double> apply_deriv(const RadialGrid& g, const std::vector<double>& f, int order) {
    const int n = g.n;
    if (static_cast<int>(f.size()) != n)
        throw std::invalid_argument("deriv: size mismatch");
    std::vector<double> out(n);
    const int m = 5;  // stencil width
    // Precompute boundary stencils once per call; interior weights are shared.
    static thread_local struct Cache {
        double h = -1.0;
        int order = -1;
        std::vector<std::vector<double>> left, right;
        std::vector<double> central;
    } cache;
    if (cache.h != g.h || cache.order != order) {
        cache.h = g.h;
        cache.order = order;
        cache.left.assign(2, {});
        cache.right.assign(2, {});
        std::vector<double> nodes(m);
        for (int j = 0; j < m; ++j) nodes[j] = (j + 0.5) * g.h;
        for (int i = 0; i < 2; ++i)
            cache.left[i] = fd_weights((i + 0.5) * g.h, nodes, order);
        std::vector<double> rnodes(m);
        for (int j = 0; j < m; ++j) rnodes[j] = 1.0 - (m - j - 0.5) * g.h;
        for (int i = 0; i < 2; ++i)
            cache.right[i] = fd_weights(1.0 - (1 - i + 0.5) * g.h, rnodes, order);
        std::vector<double> cnodes(m);
        for (int j = 0; j < m; ++j) cnodes[j] = (j - 2) * g.h;
        cache.central = fd_weights(0.0, cnodes, order);
    }
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        if (i < 2) {
            for (int j = 0; j < m; ++j) acc += cache.left[i][j] * f[j];
        } else if (i >= n - 2) {
            for (int j = 0; j < m; ++j) acc += cache.right[i - (n - 2)][j] * f[n - m + j];
        } else {
            for (int j = 0; j < m; ++j) acc += cache.central[j] * f[i - 2 + j];
        }
        out[i] = acc;
    }
    return out;
}

} // namespace

std::vector<double> deriv_x(const RadialGrid& g, const std::vector<double>& f) {
    return apply_deriv(g, f, 1);
}

std::vector<double> deriv_xx(const RadialGrid& g, const std::vector<double>& f) {
    return apply_deriv(g, f, 2);
}

std::vector<double> deriv_s(const RadialGrid& g, const std::vector<double>& f) {
    std::vector<double> fx = deriv_x(g, f);
    for (int i = 0; i < g.n; ++i) fx[i] *= g.x[i] * (1.0 - g.x[i]);
    return fx;
}

std::vector<double> deriv_ss(const RadialGrid& g, const std::vector<double>& f) {
    std::vector<double> fx = deriv_x(g, f);
    std::vector<double> fxx = deriv_xx(g, f);
    std::vector<double> out(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double c = g.x[i] * (1.0 - g.x[i]);
        out[i] = c * ((1.0 - 2.0 * g.x[i]) * fx[i] + c * fxx[i]);
    }
    return out;
}

} // namespace ckelab

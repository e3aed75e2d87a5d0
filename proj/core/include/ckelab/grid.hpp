#pragma once

#include <cstddef>
#include <vector>

namespace ckelab {

/// Coordinate maps between the compact chart x in (0,1) and s = log|z|^2.
/// x = e^s/(1+e^s), so the round measure u0'' ds equals 2 dx exactly.
double s_of_x(double x);
double x_of_s(double s);

/// Uniform midpoint grid in x with quadrature weights for integrals over the
/// whole real s-line:  int_R g(s) ds  ~=  sum_i w_i g(s_i),
/// w_i = h / (x_i (1 - x_i)).  Endpoints are excluded; integrands are expected
/// to extend by their integrable limits.
struct RadialGrid {
    int n = 0;
    double h = 0.0;               // 1/n, cell width in x
    std::vector<double> x;        // midpoint nodes, strictly increasing
    std::vector<double> s;        // s_i = log(x_i/(1-x_i))
    std::vector<double> w;        // s-line quadrature weights, positive

    static RadialGrid make(int node_count);

    /// sum_i w_i g_i over grid samples.
    double integrate_s(const std::vector<double>& g) const;

    /// Face coordinate k*h, k = 0..n (cell i spans faces i and i+1).
    double face(int k) const { return h * static_cast<double>(k); }
};

/// Finite-difference weights for the m-th derivative at point z from the
/// given nodes (Fornberg's algorithm).
std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int m);

/// Fourth-order derivatives in x of grid samples; one-sided stencils at the
/// two nodes nearest each endpoint.
std::vector<double> deriv_x(const RadialGrid& g, const std::vector<double>& f);
std::vector<double> deriv_xx(const RadialGrid& g, const std::vector<double>& f);

/// s-derivatives by chain rule: d/ds = x(1-x) d/dx.
std::vector<double> deriv_s(const RadialGrid& g, const std::vector<double>& f);
std::vector<double> deriv_ss(const RadialGrid& g, const std::vector<double>& f);

} // namespace ckelab

#pragma once

#include <functional>
#include <vector>

namespace ckelab {

using Real1D = std::function<double(double)>;

/// Integrand on (0,1) receiving the coordinate and its exact complement
/// 1 - x.  Near x = 1 the complement carries more precision than 1.0 - x
/// can (distances to 1 below machine epsilon are not representable in x).
using Real2D = std::function<double(double x, double xc)>;

/// Double-exponential (tanh-sinh) rule on (0,1).  Nodes reach arbitrarily
/// deep into both endpoints with x and 1-x stored exactly, so integrable
/// power/log endpoint singularities and narrow boundary layers integrate to
/// near machine precision.
struct TanhSinhRule {
    std::vector<double> x, xc, w;

    static const TanhSinhRule& get(double step = 0.025, double t_max = 6.2);
    double integrate(const Real2D& f) const;
};

/// Integrate over (0,1) with the default tanh-sinh rule.
double integrate_01(const Real2D& f);

/// Gauss-Legendre nodes/weights on [-1,1]; cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    static const GaussRule& get(int order);

    /// Integrate f over [a,b].
    double apply(const Real1D& f, double a, double b) const;
};

/// Composite Gauss-Legendre rule on (0,1) with panels graded geometrically
/// toward both endpoints, down to `floor_width`.  Handles integrable endpoint
/// singularities (x^{p-1} with p > 0, log x) and interior boundary layers down
/// to the floor width.
struct GradedPanels {
    std::vector<double> breakpoints;  // 0 < b_0 < ... < b_K < 1 panel edges incl. 0,1
    int gauss_order = 16;

    static GradedPanels make(double floor_width = 1e-13, double ratio = 2.0,
                             int middle_panels = 8, int gauss_order = 16);

    double integrate(const Real1D& f) const;

    /// Integral over (a, b) subset of (0,1) using the same panel structure.
    double integrate(const Real1D& f, double a, double b) const;
};

/// Default shared panel rule (cell masses, cumulative integrals).
const GradedPanels& default_panels();

/// Cumulative integral F(x) = int_0^x f, built once on the graded panel mesh;
/// evaluation re-integrates from the nearest breakpoint, so accuracy matches
/// the panel rule everywhere.
class CumulativeIntegral {
  public:
    CumulativeIntegral() = default;
    CumulativeIntegral(Real1D density, const GradedPanels& panels);

    double operator()(double x) const;
    double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }

  private:
    Real1D density_;
    std::vector<double> edges_;
    std::vector<double> prefix_;  // prefix_[k] = int_0^{edges_[k]} f
    int gauss_order_ = 16;
};

} // namespace ckelab

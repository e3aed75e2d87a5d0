#pragma once

#include "ckelab/background.hpp"
#include "ckelab/grid.hpp"
#include "ckelab/profiles.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace ckelab {

/// Newton iteration controls.  Residuals are max-norm in pointwise units
/// (cell residual divided by the cell's s-width).  The attainable floor
/// grows like N^2 through the conditioning of the linearization, about
/// 4e-9 at N = 8192; the default keeps headroom up to N = 2^14.
struct NewtonConfig {
    double abs_tolerance = 3e-8;
    int max_iterations = 30;
    int max_backtracks = 12;
    double backtrack_factor = 0.5;
    double positivity_floor = 1e-12;
};

/// Discrete second s-derivative in flux form on the midpoint grid:
/// row i is the cell integral  int_{cell i} phi''(s) ds = H_{i+1} - H_i,
/// with H_k = x(1-x) dphi/dx at face k (4th-order face gradients) and zero
/// flux at the domain faces.  Row sums telescope to zero exactly, so the
/// discrete problem inherits the continuum mass constraint.
class FluxOperator {
  public:
    explicit FluxOperator(const RadialGrid& g);
    ~FluxOperator();
    FluxOperator(FluxOperator&&) noexcept;
    FluxOperator& operator=(FluxOperator&&) noexcept;

    /// R phi (cell-integral units).
    std::vector<double> apply(const std::vector<double>& phi) const;

    /// Solve R phi = b with sum_i phi_i = 0; b should sum to ~0 (a uniform
    /// per-cell slack variable absorbs the defect, returned as `slack`).
    std::vector<double> solve_neumann(const std::vector<double>& b, double* slack = nullptr) const;

    /// Solve (R + B) dphi = rhs where row i of B is a 4-wide block starting
    /// at column col0[i] (the Newton linearization with in-cell quadrature).
    std::vector<double> solve_banded(const std::vector<int>& col0,
                                     const std::vector<std::array<double, 4>>& block,
                                     const std::vector<double>& rhs) const;

    int size() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// A prescribed-volume problem omega_phi^n = eta (linear in n = 1).
struct CalabiYauProblem {
    Density rhs;                                       // mass ~ 4 pi
    Normalization normalization = Normalization::ZeroMean;
    double mass_rel_tol = 1e-6;                        // solvable-class gate
};

struct CalabiYauResult {
    PotentialProfile profile;
    double mass_defect = 0.0;      // |int rhs ds - 2| / 2 before rescale
    double residual = 0.0;         // interior FD cross-check of v'' = f
};

/// Production route: one-sided cumulative integration of the closed-form
/// density with endpoint-graded panels (machine accurate, including conical
/// right-hand sides).  Boundary slopes v'(-inf) = 0, v'(+inf) = 2 hold by
/// construction of the flux.
CalabiYauResult solve_calabi_yau(const RadialGrid& g, const BackgroundGeometry& bg,
                                 const CalabiYauProblem& problem);

/// Discrete route through the flux operator (the operator Newton uses);
/// kept for convergence-order measurements against manufactured solutions.
CalabiYauResult solve_calabi_yau_fv(const RadialGrid& g, const BackgroundGeometry& bg,
                                    const CalabiYauProblem& problem, const FluxOperator& op);

/// Regularized volume form eta_eps = c_eps e^{-beta phi_beta + h} (|S|^2+eps)^{-(1-beta)} omega0
/// normalized to total mass 4 pi.
struct SmoothVolumeForm {
    Density density;
    double c_eps = 1.0;
};
SmoothVolumeForm smooth_volume_form(double beta, double epsilon, const RadialGrid& g);

/// Stage 2: renormalizes phi_eps by a constant shift so that
/// int e^{-beta phi}(|S|^2+eps)^{-(1-beta)} omega0 = int omega0, then solves
/// omega_psi = e^{-beta phi}(|S|^2+eps)^{-(1-beta)} omega0 (a Calabi-Yau solve).
struct RicciStageResult {
    PotentialProfile psi;               // zero mean against its own volume form
    PotentialProfile phi_normalized;    // the shifted copy of phi_eps
    double shift = 0.0;
    double residual = 0.0;
};
RicciStageResult solve_ricci_stage(const RadialGrid& g, const BackgroundGeometry& bg,
                      const PotentialProfile& phi_eps, const ConeParameters& params);

/// One node of the twisted continuity path:
///   v'' = e^{-t(v-u0) - (beta-t) phi_eps} (|S|^2+eps)^{-(1-beta)} u0''.
/// For t > 0 the solution is rigid; t = 0 degenerates to the stage-2 problem.
struct TwistedProblem {
    double t = 0.0;
    double beta = 1.0;
    double epsilon = 1.0;
    const PotentialProfile* reference = nullptr;  // normalized phi_eps
};

struct StepResult {
    bool success = false;
    PotentialProfile profile;
    int iterations = 0;
    std::vector<double> residual_history;
};

StepResult solve_continuity_step(const RadialGrid& g, const BackgroundGeometry& bg,
                                 const TwistedProblem& problem,
                                 const PotentialProfile& initial_guess,
                                 const FluxOperator& op, const NewtonConfig& cfg);

/// Adaptive continuation controls: halve the step on failure, grow by 1.5x
/// after two consecutive first-try successes.
struct ContinuationConfig {
    double dt0_fraction = 1.0 / 32.0;   // initial step = beta * fraction
    double growth = 1.5;
    double min_fraction = 1e-6;         // abort below beta * min_fraction
};

struct PathNode {
    double t = 0.0;
    PotentialProfile profile;
    double energy = 0.0;       // twisted energy, when a callback is given
    int newton_iterations = 0;
    double residual = 0.0;
};

struct ContinuityPath {
    std::vector<PathNode> nodes;
    bool success = false;
    double last_t = 0.0;       // furthest parameter reached
};

using EnergyCallback = std::function<double(const PotentialProfile&)>;

ContinuityPath run_continuity_path(const RadialGrid& g, const BackgroundGeometry& bg,
                                   const ConeParameters& params,
                                   const PotentialProfile& phi_eps_normalized,
                                   const PotentialProfile& psi_eps,
                                   const NewtonConfig& newton, const ContinuationConfig& cont,
                                   const EnergyCallback& energy = nullptr);

/// Newton solve of v'' = dens e^{-c(v-u0)} for arbitrary fixed density; used
/// by the non-positive branch and manufactured-solution tests.
StepResult solve_exponential(const RadialGrid& g, const BackgroundGeometry& bg,
                             const Density& dens, double c, const FluxOperator& op,
                             const NewtonConfig& cfg, double sup_bound = 1e300);

/// Non-positive Einstein constant branch (equation level):
///   v'' = e^{-c(v-u0)} (|S|^2+eps)^{-(1-beta)} u0''  with c <= 0,
/// with the maximum-principle bound on sup(v-u0) enforced as a trust region.
StepResult solve_nonpositive(const RadialGrid& g, const BackgroundGeometry& bg, double c,
                             double beta, double epsilon, const FluxOperator& op,
                             const NewtonConfig& cfg);

/// Pointwise Ricci certificate margin for a path node (t in [0, beta]):
///   min over the grid of  r - t v_t'' - (beta-t) v_eps'',
/// where r recombines the closed-form twisting curvature with FD second
/// derivatives of the two grid potentials.  Equals (1-beta) chi_eps up to the
/// FD-consistency defect of the solved equations; >= 0 up to O(h^2) noise.
double ricci_margin(const RadialGrid& g, double beta, double epsilon, double t,
                    const PotentialProfile& phi_t, const PotentialProfile& phi_eps);

} // namespace ckelab

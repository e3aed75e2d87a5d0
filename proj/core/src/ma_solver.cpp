#include "ckelab/ma_solver.hpp"

#include "ckelab/quadrature.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckelab {

struct FluxOperator::Impl {
    int n = 0;
    double h = 0.0;
    Eigen::SparseMatrix<double> R;
    Eigen::SparseMatrix<double> bordered;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> neumann_lu;
    bool neumann_ready = false;
};

FluxOperator::FluxOperator(const RadialGrid& g) : impl_(std::make_unique<Impl>()) {
    const int n = g.n;
    impl_->n = n;
    impl_->h = g.h;
    // face gradients: face k between nodes k-1 and k, weight set per face
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 9);
    auto add_face = [&](int k, const std::vector<int>& idx, const std::vector<double>& wts) {
        const double xk = g.face(k);
        const double c = xk * (1.0 - xk);
        // face k contributes +H_k to row k-1 and -H_k to row k
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double v = c * wts[j];
            if (k - 1 >= 0 && k - 1 < n) trip.emplace_back(k - 1, idx[j], v);
            if (k < n) trip.emplace_back(k, idx[j], -v);
        }
    };
    for (int k = 1; k < n; ++k) {
        std::vector<int> idx;
        if (k >= 2 && k <= n - 2)
            idx = {k - 2, k - 1, k, k + 1};
        else if (k == 1)
            idx = {0, 1, 2, 3};
        else
            idx = {n - 4, n - 3, n - 2, n - 1};
        std::vector<double> nodes(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) nodes[j] = g.x[idx[j]];
        add_face(k, idx, fd_weights(g.face(k), nodes, 1));
    }
    // make sure the diagonal exists for the shifted pattern
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 0.0);
    impl_->R.resize(n, n);
    impl_->R.setFromTriplets(trip.begin(), trip.end());
    impl_->R.makeCompressed();

    std::vector<Eigen::Triplet<double>> btrip;
    for (int k = 0; k < impl_->R.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(impl_->R, k); it; ++it)
            btrip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < n; ++i) {
        btrip.emplace_back(i, n, g.h);   // uniform slack column
        btrip.emplace_back(n, i, 1.0);   // zero-mean row
    }
    impl_->bordered.resize(n + 1, n + 1);
    impl_->bordered.setFromTriplets(btrip.begin(), btrip.end());
    impl_->bordered.makeCompressed();
}

FluxOperator::~FluxOperator() = default;
FluxOperator::FluxOperator(FluxOperator&&) noexcept = default;
FluxOperator& FluxOperator::operator=(FluxOperator&&) noexcept = default;

int FluxOperator::size() const { return impl_->n; }

std::vector<double> FluxOperator::apply(const std::vector<double>& phi) const {
    Eigen::Map<const Eigen::VectorXd> p(phi.data(), impl_->n);
    Eigen::VectorXd r = impl_->R * p;
    return std::vector<double>(r.data(), r.data() + impl_->n);
}

std::vector<double> FluxOperator::solve_neumann(const std::vector<double>& b, double* slack) const {
    const int n = impl_->n;
    if (!impl_->neumann_ready) {
        impl_->neumann_lu.analyzePattern(impl_->bordered);
        impl_->neumann_lu.factorize(impl_->bordered);
        if (impl_->neumann_lu.info() != Eigen::Success)
            throw std::runtime_error("FluxOperator: bordered factorization failed");
        impl_->neumann_ready = true;
    }
    Eigen::VectorXd rhs(n + 1);
    for (int i = 0; i < n; ++i) rhs[i] = b[i];
    rhs[n] = 0.0;
    Eigen::VectorXd sol = impl_->neumann_lu.solve(rhs);
    if (slack) *slack = sol[n];
    return std::vector<double>(sol.data(), sol.data() + n);
}

std::vector<double> FluxOperator::solve_banded(const std::vector<int>& col0,
                                               const std::vector<std::array<double, 4>>& block,
                                               const std::vector<double>& rhs) const {
    const int n = impl_->n;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 12);
    for (int k = 0; k < impl_->R.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(impl_->R, k); it; ++it)
            trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                              it.value());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 4; ++j) trip.emplace_back(i, col0[i] + j, block[i][j]);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("FluxOperator: banded factorization failed");
    Eigen::Map<const Eigen::VectorXd> r(rhs.data(), n);
    Eigen::VectorXd sol = lu.solve(r);
    return std::vector<double>(sol.data(), sol.data() + n);
}

namespace {

void apply_normalization(const RadialGrid& g, PotentialProfile& p, Normalization tag) {
    double shift = 0.0;
    const int n = g.n;
    switch (tag) {
        case Normalization::ZeroMean: {
            double acc = 0.0;
            for (double v : p.phi) acc += v;
            shift = -acc / n;
            break;
        }
        case Normalization::ZeroMeanSelf: {
            double num = 0.0, den = 0.0;
            for (int i = 0; i < n; ++i) {
                num += g.w[i] * p.phi[i] * p.v_second[i];
                den += g.w[i] * p.v_second[i];
            }
            shift = -num / den;
            break;
        }
        default:
            break;
    }
    if (shift != 0.0) {
        for (int i = 0; i < n; ++i) {
            p.phi[i] += shift;
            p.v[i] += shift;
        }
        if (p.analytic) {
            auto base = p.analytic;
            auto shifted = std::make_shared<ScalarField>();
            shifted->f = [base, shift](double x, double xc) { return base->f(x, xc) + shift; };
            shifted->fx = base->fx;
            shifted->fxx = base->fxx;
            shifted->ss = base->ss;
            shifted->sss = base->sss;
            p.analytic = shifted;
        }
    }
    p.normalization = tag;
}

double interior_fd_residual(const RadialGrid& g, const PotentialProfile& p) {
    const std::vector<double> dss = deriv_ss(g, p.phi);
    double worst = 0.0;
    for (int i = 4; i < g.n - 4; ++i) {
        const double v = dss[i] + BackgroundGeometry::u0_ss(g.x[i]) - p.v_second[i];
        worst = std::max(worst, std::abs(v));
    }
    return worst;
}

// v' from v'' samples by midpoint cumulative sums; exact zero/two limits.
std::vector<double> cumulative_v_prime(const RadialGrid& g, const std::vector<double>& vss) {
    std::vector<double> vp(g.n);
    double acc = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double inc = g.w[i] * (vss[i] - BackgroundGeometry::u0_ss(g.x[i]));
        vp[i] = BackgroundGeometry::u0_s(g.x[i]) + acc + 0.5 * inc;
        acc += inc;
    }
    return vp;
}

} // namespace

CalabiYauResult solve_calabi_yau(const RadialGrid& g, const BackgroundGeometry& bg,
                                 const CalabiYauProblem& problem) {
    if (!problem.rhs.dx_density)
        throw std::invalid_argument("solve_calabi_yau: density needs a closed-form backing");
    const double mass = problem.rhs.mass_s();
    CalabiYauResult out;
    out.mass_defect = std::abs(mass / 2.0 - 1.0);
    if (out.mass_defect > problem.mass_rel_tol)
        throw std::domain_error("solve_calabi_yau: rhs mass is not in the class of omega0");
    const double scale = 2.0 / mass;
    const auto dens = problem.rhs.dx_density;
    const GradedPanels& panels = default_panels();
    CumulativeIntegral W([dens, scale](double x) { return scale * dens(x) - 2.0; }, panels);
    auto wshare = std::make_shared<CumulativeIntegral>(std::move(W));
    CumulativeIntegral Phi(
        [wshare](double x) { return (*wshare)(x) / (x * (1.0 - x)); }, panels);

    PotentialProfile p;
    const int n = g.n;
    p.phi.resize(n);
    p.v.resize(n);
    p.v_prime.resize(n);
    p.v_second.resize(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.x[i];
        p.phi[i] = Phi(x);
        p.v[i] = bg.u0_vals[i] + p.phi[i];
        p.v_prime[i] = BackgroundGeometry::u0_s(x) + (*wshare)(x);
        p.v_second[i] = scale * dens(x) * x * (1.0 - x);
    }
    p.analytic = std::make_shared<ScalarField>(grid_field(g, p.phi));
    apply_normalization(g, p, problem.normalization);
    out.residual = interior_fd_residual(g, p);
    out.profile = std::move(p);
    return out;
}

CalabiYauResult solve_calabi_yau_fv(const RadialGrid& g, const BackgroundGeometry& bg,
                                    const CalabiYauProblem& problem, const FluxOperator& op) {
    const double mass = problem.rhs.mass_s();
    CalabiYauResult out;
    out.mass_defect = std::abs(mass / 2.0 - 1.0);
    if (out.mass_defect > problem.mass_rel_tol)
        throw std::domain_error("solve_calabi_yau_fv: rhs mass is not in the class of omega0");
    const double scale = 2.0 / mass;
    const int n = g.n;
    std::vector<double> b(n);
    for (int i = 0; i < n; ++i) b[i] = scale * problem.rhs.cell_mass[i] - 2.0 * g.h;
    std::vector<double> phi = op.solve_neumann(b);

    PotentialProfile p;
    p.phi = std::move(phi);
    p.v.resize(n);
    p.v_prime.resize(n);
    p.v_second.resize(n);
    for (int i = 0; i < n; ++i) {
        p.v[i] = bg.u0_vals[i] + p.phi[i];
        p.v_second[i] = scale * problem.rhs.node_values[i];
    }
    p.v_prime = cumulative_v_prime(g, p.v_second);
    p.analytic = std::make_shared<ScalarField>(grid_field(g, p.phi));
    apply_normalization(g, p, problem.normalization);
    out.residual = interior_fd_residual(g, p);
    out.profile = std::move(p);
    return out;
}

SmoothVolumeForm smooth_volume_form(double beta, double epsilon, const RadialGrid& g) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("smooth_volume_form: epsilon must lie in (0,1]");
    const double shift = -std::log(beta) / beta;
    auto dens_raw = [beta, shift, epsilon](double x) {
        const double xc = 1.0 - x;
        const double phin = FootballOracle::phi_raw_at(x, xc, beta) + shift;
        return 2.0 * std::exp(-beta * phin) * std::pow(x * xc + epsilon, beta - 1.0);
    };
    const double mass = integrate_01(
        [&dens_raw](double x, double) { return dens_raw(x); });
    SmoothVolumeForm out;
    out.c_eps = 2.0 / mass;
    const double c = out.c_eps;
    out.density = make_density(g, [dens_raw, c](double x) { return c * dens_raw(x); });
    return out;
}

RicciStageResult solve_ricci_stage(const RadialGrid& g, const BackgroundGeometry& bg,
                      const PotentialProfile& phi_eps, const ConeParameters& params) {
    params.validate();
    if (!phi_eps.analytic)
        throw std::invalid_argument("solve_ricci_stage: phi_eps needs an evaluator");
    const double beta = params.beta;
    const double eps = params.epsilon;
    auto base = phi_eps.analytic;
    auto raw = [base, beta, eps](double x) {
        return 2.0 * std::exp(-beta * base->value(x)) *
               std::pow(x * (1.0 - x) + eps, beta - 1.0);
    };
    const double I = integrate_01([&raw](double x, double) { return raw(x); });
    RicciStageResult out;
    out.shift = std::log(I / 2.0) / beta;

    out.phi_normalized = phi_eps;
    for (int i = 0; i < g.n; ++i) {
        out.phi_normalized.phi[i] += out.shift;
        out.phi_normalized.v[i] += out.shift;
    }
    const double shift = out.shift;
    auto shifted = std::make_shared<ScalarField>();
    shifted->f = [base, shift](double x, double xc) { return base->f(x, xc) + shift; };
    shifted->fx = base->fx;
    shifted->fxx = base->fxx;
    shifted->ss = base->ss;
    shifted->sss = base->sss;
    out.phi_normalized.analytic = shifted;
    out.phi_normalized.normalization = Normalization::UnitMass;

    CalabiYauProblem prob;
    prob.rhs = make_density(g, [raw, shift, beta](double x) {
        return raw(x) * std::exp(-beta * shift);
    });
    prob.normalization = Normalization::None;
    const std::vector<double> cell = prob.rhs.cell_mass;
    CalabiYauResult cy = solve_calabi_yau(g, bg, prob);
    out.psi = std::move(cy.profile);
    // the t -> 0+ limit of the continuity path fixes the constant through the
    // mass constraint: the omega_psi mean of psi must match that of phi_eps
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n; ++i) {
        num += cell[i] * (out.phi_normalized.phi[i] - out.psi.phi[i]);
        den += cell[i];
    }
    const double c0 = num / den;
    for (int i = 0; i < g.n; ++i) {
        out.psi.phi[i] += c0;
        out.psi.v[i] += c0;
    }
    if (out.psi.analytic) {
        auto base = out.psi.analytic;
        auto moved = std::make_shared<ScalarField>();
        moved->f = [base, c0](double x, double xc) { return base->f(x, xc) + c0; };
        moved->fx = base->fx;
        moved->fxx = base->fxx;
        moved->ss = base->ss;
        moved->sss = base->sss;
        out.psi.analytic = moved;
    }
    out.psi.normalization = Normalization::PathContinuous;
    out.residual = cy.residual;
    return out;
}

// In-cell quadrature of the nonlinear mass int_cell G e^{-expo phi}: two
// Gauss points per cell with the potential interpolated cubically from the
// neighboring nodes, so the Newton stages keep the flux operator's order.
struct NonlinearMass {
    std::vector<int> col0;                        // first interp column per cell
    std::vector<std::array<double, 4>> wq[2];     // interp weights per Gauss point
    std::vector<double> gdens[2];                 // (h/2) dens(x_q) per Gauss point

    NonlinearMass(const RadialGrid& g, const std::function<double(double)>& dens) {
        const int n = g.n;
        const double off = 0.5 / std::sqrt(3.0);
        col0.resize(n);
        wq[0].resize(n);
        wq[1].resize(n);
        gdens[0].resize(n);
        gdens[1].resize(n);
        for (int i = 0; i < n; ++i) {
            col0[i] = std::clamp(i - 1, 0, n - 4);
            std::vector<double> nodes(4);
            for (int j = 0; j < 4; ++j) nodes[j] = g.x[col0[i] + j];
            for (int q = 0; q < 2; ++q) {
                const double xq = (i + 0.5 + (q == 0 ? -off : off)) * g.h;
                const std::vector<double> w = fd_weights(xq, nodes, 0);
                for (int j = 0; j < 4; ++j) wq[q][i][j] = w[j];
                gdens[q][i] = 0.5 * g.h * dens(xq);
            }
        }
    }

    double mass(int i, const std::vector<double>& phi, double expo) const {
        double acc = 0.0;
        for (int q = 0; q < 2; ++q) {
            double ph = 0.0;
            for (int j = 0; j < 4; ++j) ph += wq[q][i][j] * phi[col0[i] + j];
            acc += gdens[q][i] * std::exp(-expo * ph);
        }
        return acc;
    }

    std::array<double, 4> jacobian_block(int i, const std::vector<double>& phi,
                                         double expo) const {
        std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
        for (int q = 0; q < 2; ++q) {
            double ph = 0.0;
            for (int j = 0; j < 4; ++j) ph += wq[q][i][j] * phi[col0[i] + j];
            const double m = gdens[q][i] * std::exp(-expo * ph);
            for (int j = 0; j < 4; ++j) out[j] += expo * m * wq[q][i][j];
        }
        return out;
    }
};

static StepResult newton_solve(const RadialGrid& g, const BackgroundGeometry& bg,
                               const NonlinearMass& nm, const std::vector<double>& nodeG,
                               double expo, const std::vector<double>& initial,
                               const FluxOperator& op, const NewtonConfig& cfg,
                               double sup_bound) {
    // Solves cell-form  R phi + 2h = int_cell G e^{-expo phi}  (expo = t or c).
    const int n = g.n;
    StepResult out;
    std::vector<double> phi = initial;
    auto residual_of = [&](const std::vector<double>& ph, std::vector<double>& F) {
        F = op.apply(ph);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            F[i] += 2.0 * g.h - nm.mass(i, ph, expo);
            worst = std::max(worst, std::abs(F[i]) / g.w[i]);
        }
        return worst;
    };
    std::vector<double> F, trial, Ft;
    double res = residual_of(phi, F);
    out.residual_history.push_back(res);
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (res < cfg.abs_tolerance) {
            out.success = true;
            break;
        }
        std::vector<std::array<double, 4>> block(n);
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) {
            block[i] = nm.jacobian_block(i, phi, expo);
            rhs[i] = -F[i];
        }
        std::vector<double> dphi;
        try {
            dphi = op.solve_banded(nm.col0, block, rhs);
        } catch (const std::runtime_error&) {
            break;
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            trial.resize(n);
            for (int i = 0; i < n; ++i)
                trial[i] = std::min(phi[i] + lambda * dphi[i], sup_bound);
            const double rt = residual_of(trial, Ft);
            // positivity of the metric proxy along the iterate
            bool positive = true;
            if (std::isfinite(rt)) {
                std::vector<double> rr = op.apply(trial);
                for (int i = 0; i < n; ++i) {
                    if (bg.u0pp_vals[i] + rr[i] / g.w[i] < cfg.positivity_floor) {
                        positive = false;
                        break;
                    }
                }
            }
            if (std::isfinite(rt) && positive && rt < res) {
                phi.swap(trial);
                F.swap(Ft);
                res = rt;
                accepted = true;
                break;
            }
            lambda *= cfg.backtrack_factor;
        }
        ++out.iterations;
        if (!accepted) break;
        out.residual_history.push_back(res);
        if (res < cfg.abs_tolerance) {
            out.success = true;
            break;
        }
    }
    if (res < cfg.abs_tolerance) out.success = true;

    PotentialProfile p;
    p.phi = std::move(phi);
    p.v.resize(n);
    p.v_second.resize(n);
    for (int i = 0; i < n; ++i) {
        p.v[i] = bg.u0_vals[i] + p.phi[i];
        p.v_second[i] = nodeG[i] * std::exp(-expo * p.phi[i]);
    }
    p.v_prime = cumulative_v_prime(g, p.v_second);
    p.analytic = std::make_shared<ScalarField>(grid_field(g, p.phi));
    out.profile = std::move(p);
    return out;
}

StepResult solve_continuity_step(const RadialGrid& g, const BackgroundGeometry& bg,
                                 const TwistedProblem& problem,
                                 const PotentialProfile& initial_guess,
                                 const FluxOperator& op, const NewtonConfig& cfg) {
    if (!(problem.t > 0.0))
        throw std::invalid_argument("solve_continuity_step: t must be positive");
    if (!problem.reference || !problem.reference->analytic)
        throw std::invalid_argument("solve_continuity_step: missing reference potential");
    auto ref = problem.reference->analytic;
    const double a = problem.beta - problem.t;
    const double eps = problem.epsilon;
    auto dens2 = [ref, a, eps, beta = problem.beta](double x) {
        return 2.0 * std::exp(-a * ref->value(x)) * std::pow(x * (1.0 - x) + eps, beta - 1.0);
    };
    const int n = g.n;
    std::vector<double> nodeG(n);
    for (int i = 0; i < n; ++i) nodeG[i] = dens2(g.x[i]) * g.x[i] * (1.0 - g.x[i]);
    const NonlinearMass nm(g, dens2);
    return newton_solve(g, bg, nm, nodeG, problem.t, initial_guess.phi, op, cfg, 1e300);
}

ContinuityPath run_continuity_path(const RadialGrid& g, const BackgroundGeometry& bg,
                                   const ConeParameters& params,
                                   const PotentialProfile& phi_eps_normalized,
                                   const PotentialProfile& psi_eps,
                                   const NewtonConfig& newton, const ContinuationConfig& cont,
                                   const EnergyCallback& energy) {
    const double beta = params.beta;
    FluxOperator op(g);
    ContinuityPath path;
    PathNode first;
    first.t = 0.0;
    first.profile = psi_eps;
    first.residual = 0.0;
    if (energy) first.energy = energy(psi_eps);
    path.nodes.push_back(std::move(first));

    double t = 0.0;
    double dt = beta * cont.dt0_fraction;
    int streak = 0;
    while (t < beta - 1e-15) {
        dt = std::min(dt, beta - t);
        const double target = t + dt;
        TwistedProblem prob;
        prob.t = target;
        prob.beta = beta;
        prob.epsilon = params.epsilon;
        prob.reference = &phi_eps_normalized;
        StepResult step =
            solve_continuity_step(g, bg, prob, path.nodes.back().profile, op, newton);
        if (step.success) {
            PathNode node;
            node.t = target;
            node.profile = std::move(step.profile);
            node.newton_iterations = step.iterations;
            node.residual = step.residual_history.back();
            if (energy) node.energy = energy(node.profile);
            path.nodes.push_back(std::move(node));
            t = target;
            ++streak;
            if (streak >= 2) {
                dt *= cont.growth;
                streak = 0;
            }
        } else {
            dt *= 0.5;
            streak = 0;
            if (dt < beta * cont.min_fraction) break;
        }
    }
    path.last_t = t;
    path.success = (std::abs(t - beta) < 1e-12);
    return path;
}

StepResult solve_exponential(const RadialGrid& g, const BackgroundGeometry& bg,
                             const Density& dens, double c, const FluxOperator& op,
                             const NewtonConfig& cfg, double sup_bound) {
    if (!(c < 0.0))
        throw std::invalid_argument("solve_exponential: needs c < 0 (c = 0 is a Calabi-Yau solve)");
    if (!dens.dx_density)
        throw std::invalid_argument("solve_exponential: density needs a closed-form backing");
    std::vector<double> zero(g.n, 0.0);
    const NonlinearMass nm(g, dens.dx_density);
    return newton_solve(g, bg, nm, dens.node_values, c, zero, op, cfg, sup_bound);
}

StepResult solve_nonpositive(const RadialGrid& g, const BackgroundGeometry& bg, double c,
                             double beta, double epsilon, const FluxOperator& op,
                             const NewtonConfig& cfg) {
    if (c > 0.0) throw std::invalid_argument("solve_nonpositive: needs c <= 0");
    auto raw = [beta, epsilon](double x) {
        return 2.0 * std::pow(x * (1.0 - x) + epsilon, beta - 1.0);
    };
    const double mass = integrate_01([&raw](double x, double) { return raw(x); });
    const double cn = 2.0 / mass;
    Density d = make_density(g, [raw, cn](double x) { return cn * raw(x); });
    if (c == 0.0) {
        CalabiYauProblem prob;
        prob.rhs = std::move(d);
        prob.normalization = Normalization::ZeroMean;
        CalabiYauResult cy = solve_calabi_yau(g, bg, prob);
        StepResult out;
        out.success = true;
        out.profile = std::move(cy.profile);
        out.residual_history.push_back(cy.residual);
        return out;
    }
    // maximum-principle trust region: at an interior max of v - u0,
    // e^{|c| phi} <= u0''/G, so sup phi <= (1/|c|) log sup(u0''/G)
    double worst = 0.0;
    for (int i = 0; i < g.n; ++i)
        worst = std::max(worst, bg.u0pp_vals[i] / d.node_values[i]);
    const double bound = std::log(worst) / std::abs(c) + 0.5;
    return solve_exponential(g, bg, d, c, op, cfg, bound);
}

double ricci_margin(const RadialGrid& g, double beta, double epsilon, double t,
                    const PotentialProfile& phi_t, const PotentialProfile& phi_eps) {
    const std::vector<double> dss_t = deriv_ss(g, phi_t.phi);
    const std::vector<double> dss_e = deriv_ss(g, phi_eps.phi);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x[i];
        const double u = BackgroundGeometry::u0_ss(x);
        const double v =
            (1.0 - beta) * TwistingProfile::chi_s(x, 1.0 - x, epsilon) +
            t * (dss_t[i] + u - phi_t.v_second[i]) +
            (beta - t) * (dss_e[i] + u - phi_eps.v_second[i]);
        margin = std::min(margin, v);
    }
    return margin;
}

} // namespace ckelab

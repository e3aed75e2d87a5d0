#pragma once

#include "ckelab/profiles.hpp"

#include <utility>
#include <vector>

namespace ckelab {

/// Family phi(t) joining 0 to phi; the two built-in reparametrizations are
/// enough to exercise path independence.
enum class PathRule { Linear, Quadratic };

/// Which measure the entropy term of the explicit K-energy expression is
/// integrated against.  The two readings differ on non-round potentials;
/// exactly one matches the path integral.
enum class EntropyVariant { AgainstOmega0, AgainstOmegaPhi };

struct EnergyReport {
    double E_path = 0.0;
    double E_closed_variant_a = 0.0;  // entropy against omega0^n (as printed)
    double E_closed_variant_b = 0.0;  // entropy against omega_phi^n
    double I = 0.0;
    double Q = 0.0;
    double J_chi_eps_path = 0.0;
    double J_chi_eps_closed = 0.0;
    double J_chi = 0.0;               // divisor-sum route
    double J_chi_closed = 0.0;
    double J0 = 0.0;
    double twisted_eps = 0.0;         // E + (1-beta) J_chi_eps
    double twisted_limit = 0.0;       // E + (1-beta) J_chi
    double c3_estimate = 0.0;
    double c6_estimate = 0.0;
};

/// Quadrature preset for the energy integrals: Fine is the default graded
/// rule; Trace is a cheaper rule for per-node energies along continuity paths
/// (differences of nearby profiles, where the quadrature bias cancels).
enum class EnergyRule { Fine, Trace };

/// K-energy by the path integral
///   E = -n int_0^1 dt int phidot (Ric(omega_t) - omega_t) wedge omega_t^{n-1},
/// evaluated at the current level: endpoints with cone exponent p < 1 carry
/// Ricci point masses 2 pi (1-p) at the poles, which contribute
/// -2 pi (1-p) phi(pole) per pole.
double k_energy_path(const PotentialProfile& phi, PathRule rule = PathRule::Linear,
                     int t_samples = 32, EnergyRule quad = EnergyRule::Fine);

/// Explicit expression  E = Ent + I + Q  with
///   I = n int dt int phidot omega_t^n,  Q = -n int dt int phidot Ric(omega0) omega_t^{n-1}.
double k_energy_closed(const PotentialProfile& phi, EntropyVariant variant);

double i_functional(const PotentialProfile& phi);
double q_functional(const PotentialProfile& phi);

double j_chi_eps_path(const PotentialProfile& phi, double epsilon,
                      PathRule rule = PathRule::Linear, int t_samples = 32,
                      EnergyRule quad = EnergyRule::Fine);
double j_chi_eps_closed(const PotentialProfile& phi, double epsilon);

/// J_chi by the n = 1 divisor formula: 2 pi (phi(0) + phi(inf)) minus the
/// I-functional path term.  Requires finite pole limits.
double j_chi(const PotentialProfile& phi, PathRule rule = PathRule::Linear, int t_samples = 32,
             EnergyRule quad = EnergyRule::Fine);
double j_chi_closed(const PotentialProfile& phi);

/// J0 = int phi (omega0 - omega_phi) = 2 pi int x(1-x) phi_x^2 dx  >= 0.
double j0(const PotentialProfile& phi);

struct TwistedEnergies {
    double eps_energy = 0.0;    // E_{eps,(1-beta)D}
    double limit_energy = 0.0;  // E_{(1-beta)D}
    double E = 0.0;
    double J_eps = 0.0;
    double J_lim = 0.0;
};
TwistedEnergies twisted_energies(const PotentialProfile& phi, double epsilon, double beta,
                                 int t_samples = 32, EnergyRule quad = EnergyRule::Fine);

/// C3 = int log(1 + 1/|S|^2) omega0, the eps = 1 worst case of the
/// regularization gap: J_chi_eps >= J_chi - C3 for every Kahler potential.
double regularization_gap_constant();

EnergyReport energy_report(const PotentialProfile& phi, double epsilon, double beta,
                           int t_samples = 32);

struct PropernessScan {
    std::vector<std::pair<double, double>> points;  // (J0, E_{(1-beta)D})
    double c4 = 0.0;
    double c5 = 0.0;  // E >= c4 J0 - c5 on the sample
};
PropernessScan properness_scan(const std::vector<PotentialProfile>& family, double beta,
                               int t_samples = 32);

struct MonotonicityCertificate {
    bool monotone = true;
    double max_increase = 0.0;           // worst trace[k+1]-trace[k], tolerance-adjusted
    std::vector<int> violations;         // indices k with an increase beyond tolerance
};
MonotonicityCertificate monotonicity_check(const std::vector<double>& trace,
                                           double rel_tol = 1e-8);

} // namespace ckelab

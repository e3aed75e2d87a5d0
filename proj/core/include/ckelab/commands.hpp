#pragma once

#include "ckelab/reports.hpp"

namespace ckelab {

/// Exit codes: 0 all criteria pass, 1 criterion failure, 2 config error
/// (raised as ConfigError before a command starts), 3 solver failure.
struct CommandResult {
    RunReport report;
    int exit_code = 0;
};

/// Smoothing pipeline (eta_eps -> phi_eps -> psi_eps) with certificates and
/// the Gromov-Hausdorff table, one CSV row per epsilon.
CommandResult cmd_pipeline(const ExperimentConfig& cfg);

/// Continuity path to t = beta per epsilon: monotone twisted-energy trace,
/// endpoint Ricci bound, endpoint-vs-oracle distance.
CommandResult cmd_continuity(const ExperimentConfig& cfg);

/// Energy-functional identities over the seeded potential family.
CommandResult cmd_energies(const ExperimentConfig& cfg);

/// Closed-form oracle residuals and geometric identities per beta.
CommandResult cmd_oracle_check(const ExperimentConfig& cfg);

} // namespace ckelab

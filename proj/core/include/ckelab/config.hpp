#pragma once

#include "ckelab/geodesics.hpp"
#include "ckelab/ma_solver.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ckelab {

/// Raised on malformed configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    double beta = 0.5;
    double beta0 = 0.5;
    double lambda = 1.0;
    std::vector<double> epsilon_schedule = {1.0, 1e-1, 1e-2, 1e-3, 1e-4};
    int grid_size = 8192;
    double lp_exponent = 1.9;
    NewtonConfig newton;
    ContinuationConfig continuation;
    GeodesicGraphConfig distance;
    int energy_t_samples = 32;
    int potential_count = 20;          // seeded family size for energy suites
    double potential_amplitude = 0.6;
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    void validate() const;
    ConeParameters cone_parameters(double epsilon) const;
};

/// Parse a JSON config file; unknown keys are rejected.  Missing keys keep
/// their defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

/// FNV-1a hash of the canonical serialized form (provenance, determinism).
std::uint64_t config_hash(const ExperimentConfig& c);
std::string config_canonical_json(const ExperimentConfig& c);

} // namespace ckelab

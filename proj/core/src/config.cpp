#include "ckelab/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ckelab {

using nlohmann::json;

void ExperimentConfig::validate() const {
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0,1]");
    if (!(beta0 > 0.0 && beta0 <= beta)) throw ConfigError("beta0 must lie in (0, beta]");
    if (epsilon_schedule.empty()) throw ConfigError("epsilon_schedule must be nonempty");
    for (std::size_t i = 0; i < epsilon_schedule.size(); ++i) {
        const double e = epsilon_schedule[i];
        if (!(e > 0.0 && e <= 1.0)) throw ConfigError("epsilon values must lie in (0,1]");
        if (i > 0 && !(e < epsilon_schedule[i - 1]))
            throw ConfigError("epsilon_schedule must be strictly decreasing");
    }
    const bool pow2 = (grid_size & (grid_size - 1)) == 0;
    if (!pow2 || grid_size < (1 << 9) || grid_size > (1 << 15))
        throw ConfigError("grid_size must be a power of two in [2^9, 2^15]");
    if (!(lp_exponent > 1.0 && lp_exponent * (1.0 - beta0) < 1.0))
        throw ConfigError("lp_exponent must lie in (1, 1/(1-beta0))");
    if (!(newton.abs_tolerance > 0.0)) throw ConfigError("newton tolerance must be positive");
    if (newton.max_iterations < 1) throw ConfigError("newton max_iterations must be >= 1");
    if (!(newton.positivity_floor > 0.0)) throw ConfigError("positivity floor must be positive");
    if (distance.rings < 16 || distance.sectors < 16)
        throw ConfigError("distance grid must be at least 16x16");
    if (distance.sectors % distance.sample_rings != 0)
        throw ConfigError("sectors must be divisible by sample_rings");
    if (distance.stencil < 1 || distance.stencil > 8)
        throw ConfigError("distance stencil must lie in [1, 8]");
    if (potential_count < 1) throw ConfigError("potential_count must be >= 1");
}

ConeParameters ExperimentConfig::cone_parameters(double epsilon) const {
    ConeParameters p;
    p.beta = beta;
    p.beta0 = beta0;
    p.lambda = lambda;
    p.epsilon = epsilon;
    p.lp_exponent = lp_exponent;
    return p;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

} // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    reject_unknown(j, {"beta", "beta0", "lambda", "epsilon_schedule", "grid_size", "lp_exponent",
                       "newton", "continuation", "distance", "energy_t_samples",
                       "potential_count", "potential_amplitude", "out_dir", "seed"},
                   "root");
    c.beta = j.value("beta", c.beta);
    c.beta0 = j.value("beta0", c.beta0);
    c.lambda = j.value("lambda", c.lambda);
    if (j.contains("epsilon_schedule"))
        c.epsilon_schedule = j.at("epsilon_schedule").get<std::vector<double>>();
    c.grid_size = j.value("grid_size", c.grid_size);
    c.lp_exponent = j.value("lp_exponent", c.lp_exponent);
    if (j.contains("newton")) {
        const json& n = j.at("newton");
        reject_unknown(n, {"abs_tolerance", "max_iterations", "max_backtracks",
                           "backtrack_factor", "positivity_floor"},
                       "newton");
        c.newton.abs_tolerance = n.value("abs_tolerance", c.newton.abs_tolerance);
        c.newton.max_iterations = n.value("max_iterations", c.newton.max_iterations);
        c.newton.max_backtracks = n.value("max_backtracks", c.newton.max_backtracks);
        c.newton.backtrack_factor = n.value("backtrack_factor", c.newton.backtrack_factor);
        c.newton.positivity_floor = n.value("positivity_floor", c.newton.positivity_floor);
    }
    if (j.contains("continuation")) {
        const json& n = j.at("continuation");
        reject_unknown(n, {"dt0_fraction", "growth", "min_fraction"}, "continuation");
        c.continuation.dt0_fraction = n.value("dt0_fraction", c.continuation.dt0_fraction);
        c.continuation.growth = n.value("growth", c.continuation.growth);
        c.continuation.min_fraction = n.value("min_fraction", c.continuation.min_fraction);
    }
    if (j.contains("distance")) {
        const json& n = j.at("distance");
        reject_unknown(n, {"rings", "sectors", "stencil", "sample_rings"}, "distance");
        c.distance.rings = n.value("rings", c.distance.rings);
        c.distance.sectors = n.value("sectors", c.distance.sectors);
        c.distance.stencil = n.value("stencil", c.distance.stencil);
        c.distance.sample_rings = n.value("sample_rings", c.distance.sample_rings);
    }
    c.energy_t_samples = j.value("energy_t_samples", c.energy_t_samples);
    c.potential_count = j.value("potential_count", c.potential_count);
    c.potential_amplitude = j.value("potential_amplitude", c.potential_amplitude);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_canonical_json(const ExperimentConfig& c) {
    json j;
    j["beta"] = c.beta;
    j["beta0"] = c.beta0;
    j["lambda"] = c.lambda;
    j["epsilon_schedule"] = c.epsilon_schedule;
    j["grid_size"] = c.grid_size;
    j["lp_exponent"] = c.lp_exponent;
    j["newton"] = {{"abs_tolerance", c.newton.abs_tolerance},
                   {"max_iterations", c.newton.max_iterations},
                   {"max_backtracks", c.newton.max_backtracks},
                   {"backtrack_factor", c.newton.backtrack_factor},
                   {"positivity_floor", c.newton.positivity_floor}};
    j["continuation"] = {{"dt0_fraction", c.continuation.dt0_fraction},
                         {"growth", c.continuation.growth},
                         {"min_fraction", c.continuation.min_fraction}};
    j["distance"] = {{"rings", c.distance.rings},
                     {"sectors", c.distance.sectors},
                     {"stencil", c.distance.stencil},
                     {"sample_rings", c.distance.sample_rings}};
    j["energy_t_samples"] = c.energy_t_samples;
    j["potential_count"] = c.potential_count;
    j["potential_amplitude"] = c.potential_amplitude;
    j["seed"] = c.seed;
    return j.dump();  // nlohmann::json orders keys, so the dump is canonical
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string s = config_canonical_json(c);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace ckelab

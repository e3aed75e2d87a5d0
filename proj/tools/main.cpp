#include "ckelab/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <string>

namespace {

int run(const std::function<ckelab::CommandResult(const ckelab::ExperimentConfig&)>& cmd,
        const std::string& config_path, const std::string& out_dir, long long seed) {
    ckelab::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = ckelab::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.validate();
    } catch (const ckelab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    ckelab::CommandResult res = cmd(cfg);
    res.report.write(cfg.out_dir);
    for (const auto& v : res.report.verdicts)
        std::printf("%-32s %s  value=%.6e threshold=%.6e\n", v.name.c_str(),
                    v.pass ? "PASS" : "FAIL", v.value, v.threshold);
    if (res.exit_code == 3) {
        const auto& extra = res.report.extra;
        std::fprintf(stderr, "solver failure in stage: %s\n",
                     extra.contains("failed_stage")
                         ? extra["failed_stage"].get<std::string>().c_str()
                         : "?");
        if (extra.contains("last_t"))
            std::fprintf(stderr, "last reached t: %.6f\n", extra["last_t"].get<double>());
    }
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smooth approximation laboratory for conical Kahler-Einstein metrics on P^1"};
    app.require_subcommand(1);
    app.fallthrough();  // allow --config/--out/--seed after the subcommand

    std::string config_path, out_dir;
    long long seed = -1;
    app.add_option("--config", config_path, "JSON experiment configuration");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "random seed (overrides config)");

    auto* pipeline = app.add_subcommand(
        "pipeline", "smoothing pipeline with Ricci/diameter/GH certificates");
    auto* continuity =
        app.add_subcommand("continuity", "continuity path to t = beta with energy trace");
    auto* energies = app.add_subcommand("energies", "energy functional identity suite");
    auto* oracle = app.add_subcommand("oracle-check", "closed-form oracle residuals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors share the config-error exit code
    }

    if (pipeline->parsed()) return run(ckelab::cmd_pipeline, config_path, out_dir, seed);
    if (continuity->parsed()) return run(ckelab::cmd_continuity, config_path, out_dir, seed);
    if (energies->parsed()) return run(ckelab::cmd_energies, config_path, out_dir, seed);
    if (oracle->parsed()) return run(ckelab::cmd_oracle_check, config_path, out_dir, seed);
    return 2;
}

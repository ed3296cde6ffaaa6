// Command-line front end: landscape sweeps, identity verification, single
// optimization runs and multi-seed method comparisons, all driven by one JSON
// configuration with deterministic seeded outputs.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "contpol/commands.hpp"
#include "contpol/config.hpp"
#include "contpol/io.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path,
                    "JSON configuration file (defaults apply to absent fields)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opt.out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "override the configured seed");
    cmd->add_option("--threads", opt.threads,
                    "override the configured worker thread count");
}

contpol::ExperimentConfig load_config(const CommonOptions& opt) {
    contpol::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = contpol::parse_config_text(
            contpol::read_text_file(opt.config_path));
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) {
        if (*opt.threads < 1)
            throw contpol::ConfigError("--threads must be >= 1");
        cfg.threads = *opt.threads;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Policy optimization by continuation on the hill-car benchmark"};
    app.require_subcommand(1);

    CommonOptions sweep_opt, verify_opt, optimize_opt, compare_opt;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "return landscape over theta for each noise level");
    add_common(sweep, sweep_opt);
    CLI::App* verify = app.add_subcommand(
        "verify", "statistical checks of the mirror-policy identities");
    add_common(verify, verify_opt);
    CLI::App* optimize = app.add_subcommand(
        "optimize", "one optimization run of the configured method");
    add_common(optimize, optimize_opt);
    CLI::App* compare = app.add_subcommand(
        "compare", "multi-seed success-rate comparison of methods");
    add_common(compare, compare_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            const auto cfg = load_config(sweep_opt);
            return contpol::cmd_sweep(cfg, sweep_opt.out_dir, cfg.threads);
        }
        if (verify->parsed()) {
            const auto cfg = load_config(verify_opt);
            return contpol::cmd_verify(cfg, verify_opt.out_dir, cfg.threads);
        }
        if (optimize->parsed()) {
            const auto cfg = load_config(optimize_opt);
            return contpol::cmd_optimize(cfg, optimize_opt.out_dir,
                                         cfg.threads);
        }
        if (compare->parsed()) {
            const auto cfg = load_config(compare_opt);
            return contpol::cmd_compare(cfg, compare_opt.out_dir, cfg.threads);
        }
    } catch (const contpol::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "contpol/config.hpp"
#include "contpol/continuation.hpp"
#include "contpol/hillcar.hpp"
#include "contpol/io.hpp"
#include "contpol/landscape.hpp"
#include "contpol/mdp.hpp"
#include "contpol/optimize.hpp"
#include "contpol/policy.hpp"
#include "contpol/verify.hpp"

namespace contpol {

namespace cmddetail {

inline Mdp<CarState> noise_free_mdp(const ExperimentConfig& cfg) {
    ExperimentConfig quiet = cfg;
    quiet.env.noise_std = 0.0;
    return vdetail::env_mdp(quiet);
}

// Ground-truth basin structure of the deterministic return over the sweep
// range, on the noise-free environment (the curve is exact there).
inline BasinOracle basin_oracle(const ExperimentConfig& cfg, int threads) {
    const double xt = vdetail::env_profile(cfg).x_target();
    return BasinOracle::build(noise_free_mdp(cfg), xt, cfg.sweep.theta_min,
                              cfg.sweep.theta_max, cfg.oracle.pitch,
                              cfg.oracle.n_rollouts,
                              StreamFamily(cfg.seed).derive(fnv1a64("oracle")),
                              threads);
}

inline CovarianceFn<CarState> base_covariance(const ExperimentConfig& cfg,
                                              double x_target) {
    if (cfg.optimize.cov_kind == "constant")
        return scalar_constant_cov(cfg.optimize.cov_param);
    return state_radial_cov(cfg.optimize.cov_param, x_target);
}

struct MethodOutcome {
    RunRecord run;
    std::string method;
};

// One optimization run of the configured kind, seeded by `seed` alone so the
// comparison sweep can vary seeds without touching the rest of the config.
inline MethodOutcome run_method(const ExperimentConfig& cfg,
                                const std::string& method, std::uint64_t seed,
                                int threads) {
    const auto mdp = vdetail::env_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    const auto start = k_controller(cfg.optimize.theta0, 0.0, xt);
    const StreamFamily fam = StreamFamily(seed).derive(fnv1a64(method));
    MethodOutcome out;
    out.method = method;
    if (method == "continuation") {
        OptimizerConfig oc;
        oc.steps_per_stage = cfg.optimize.steps_per_stage;
        oc.stepsize = cfg.optimize.stepsize;
        oc.n_rollouts = cfg.optimize.n_rollouts;
        oc.grad_clip = cfg.optimize.grad_clip;
        oc.threads = threads;
        const auto sched = Schedule::geometric(cfg.optimize.schedule.scale0,
                                               cfg.optimize.schedule.rho,
                                               cfg.optimize.schedule.stages);
        out.run = optimize_by_continuation(mdp, start, base_covariance(cfg, xt),
                                           sched, oc, fam);
    } else if (method == "deterministic") {
        OptimizerConfig oc;
        oc.iterations = cfg.optimize.det_iterations;
        oc.stepsize = cfg.optimize.det_stepsize;
        oc.n_rollouts = cfg.optimize.det_n_rollouts;
        oc.grad_clip = cfg.optimize.det_grad_clip;
        oc.threads = threads;
        out.run = deterministic_ascent_baseline(mdp, start, oc, fam);
    } else if (method == "entropy_reg") {
        OptimizerConfig oc;
        oc.iterations = cfg.optimize.ent_iterations;
        oc.stepsize = cfg.optimize.ent_stepsize;
        oc.n_rollouts = cfg.optimize.n_rollouts;
        oc.grad_clip = cfg.optimize.grad_clip;
        oc.entropy_coef0 = cfg.optimize.entropy_coef0;
        oc.entropy_decay = cfg.optimize.entropy_decay;
        oc.threads = threads;
        auto features = [xt](const CarState& s) {
            return Eigen::MatrixXd::Constant(1, 1, s.x - xt);
        };
        out.run = entropy_regularized_ascent(
            mdp, features, Eigen::VectorXd::Constant(1, cfg.optimize.theta0),
            cfg.optimize.sigma0, oc, fam);
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    return out;
}

// Exact score of a parameter value: its return under the noise-free
// deterministic rollout.
inline double noise_free_value(const ExperimentConfig& cfg, double theta) {
    const auto mdp = noise_free_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    return discounted_return(
        rollout(mdp, k_controller(theta, 0.0, xt), RandomStream(0, 0)),
        mdp.discount);
}

}  // namespace cmddetail

// Return-landscape sweep over theta for each controller noise level, with a
// per-level count of windowed local maxima.
inline int cmd_sweep(const ExperimentConfig& cfg,
                     const std::filesystem::path& out_dir, int threads) {
    const auto mdp = vdetail::env_mdp(cfg);
    const double xt = vdetail::env_profile(cfg).x_target();
    const auto grid =
        theta_grid(cfg.sweep.theta_min, cfg.sweep.theta_max, cfg.sweep.pitch);
    const StreamFamily fam = StreamFamily(cfg.seed).derive(fnv1a64("sweep"));
    const std::size_t window = maxima_window(cfg.sweep.pitch);

    CsvWriter csv({"theta", "sigma_prime", "return_mean", "return_stderr", "n"});
    csv.comment(provenance_line(cfg));
    json counts = json::array();
    for (double sp : cfg.sweep.sigma_list) {
        const auto curve =
            return_curve(mdp, xt, grid, sp, cfg.sweep.n_rollouts, fam, threads);
        std::vector<double> means;
        means.reserve(curve.size());
        for (const auto& pt : curve) {
            means.push_back(pt.mean);
            csv.row({format_double(pt.theta), format_double(pt.sigma_prime),
                     format_double(pt.mean), format_double(pt.stderr_),
                     std::to_string(pt.n)});
        }
        const auto maxima = windowed_maxima(means, window);
        json thetas_at = json::array();
        for (std::size_t i : maxima) thetas_at.push_back(grid[i]);
        counts.push_back({{"sigma_prime", sp},
                          {"maxima", maxima.size()},
                          {"maxima_thetas", thetas_at}});
        std::printf("sigma'=%s: %zu local maxima\n", format_double(sp).c_str(),
                    maxima.size());
    }

    write_text_file(out_dir / "sweep.csv", csv.str());
    write_json_file(out_dir / "sweep_summary.json",
                    json{{"seed", cfg.seed},
                         {"config_hash", config_hash_hex(cfg)},
                         {"pitch", cfg.sweep.pitch},
                         {"window", window},
                         {"levels", counts}});
    return 0;
}

// Statistical verification of the distributional identities; exit status
// reports whether every check passed.
inline int cmd_verify(const ExperimentConfig& cfg,
                      const std::filesystem::path& out_dir, int threads) {
    const VerifyReport rep = run_verification(cfg, threads);
    for (const auto& c : rep.checks)
        std::printf("%s %s (observed %.6g, bound %.6g)\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.observed,
                    c.bound);
    std::printf("%zu checks, %s\n", rep.checks.size(),
                rep.all_pass() ? "all passed" : "FAILURES PRESENT");
    write_json_file(out_dir / "verify_report.json",
                    json{{"seed", cfg.seed},
                         {"config_hash", config_hash_hex(cfg)},
                         {"all_pass", rep.all_pass()},
                         {"checks", rep.to_json()}});
    return rep.all_pass() ? 0 : 1;
}

// One optimization run of the configured method, with its trace and a basin
// label for the final parameters.
inline int cmd_optimize(const ExperimentConfig& cfg,
                        const std::filesystem::path& out_dir, int threads) {
    const auto outcome =
        cmddetail::run_method(cfg, cfg.optimize.method, cfg.seed, threads);
    const auto oracle = cmddetail::basin_oracle(cfg, threads);
    const double theta_final = outcome.run.theta_final(0);
    const std::string basin = oracle.label(theta_final);

    CsvWriter csv({"stage", "step", "scale", "theta", "grad_norm", "value_mean",
                   "value_stderr", "sigma", "entropy_coef"});
    csv.comment(provenance_line(cfg));
    for (const auto& r : outcome.run.steps) {
        csv.row({std::to_string(r.stage), std::to_string(r.step),
                 format_double(r.scale), format_double(r.theta(0)),
                 format_double(r.grad_norm), format_double(r.value.mean),
                 format_double(r.value.stderr_),
                 std::isnan(r.sigma) ? "" : format_double(r.sigma),
                 std::isnan(r.entropy_coef) ? ""
                                            : format_double(r.entropy_coef)});
    }
    write_text_file(out_dir / "optimize_trace.csv", csv.str());

    json maxima = json::array();
    for (std::size_t k = 0; k < oracle.maxima().size(); ++k)
        maxima.push_back(oracle.maximum_theta(k));
    json summary{{"seed", cfg.seed},
                 {"config_hash", config_hash_hex(cfg)},
                 {"method", outcome.method},
                 {"theta_final", theta_final},
                 {"basin", basin},
                 {"noise_free_value",
                  cmddetail::noise_free_value(cfg, theta_final)},
                 {"oracle_maxima", maxima}};
    if (!std::isnan(outcome.run.sigma_final))
        summary["sigma_final"] = outcome.run.sigma_final;
    write_json_file(out_dir / "optimize_summary.json", summary);
    std::printf("method=%s theta_final=%s basin=%s\n", outcome.method.c_str(),
                format_double(theta_final).c_str(), basin.c_str());
    return 0;
}

// Repeated optimization runs across methods and seeds, with per-method
// global-basin success rates.
inline int cmd_compare(const ExperimentConfig& cfg,
                       const std::filesystem::path& out_dir, int threads) {
    const auto oracle = cmddetail::basin_oracle(cfg, threads);
    CsvWriter csv({"method", "seed", "theta_final", "noise_free_value", "basin"});
    csv.comment(provenance_line(cfg));
    json rates = json::array();
    for (const std::string& method : cfg.compare.methods) {
        std::size_t global = 0;
        for (std::uint64_t seed : cfg.compare.seeds) {
            const auto outcome =
                cmddetail::run_method(cfg, method, seed, threads);
            const double theta_final = outcome.run.theta_final(0);
            const std::string basin = oracle.label(theta_final);
            if (basin == "global") ++global;
            csv.row({method, std::to_string(seed), format_double(theta_final),
                     format_double(
                         cmddetail::noise_free_value(cfg, theta_final)),
                     basin});
        }
        const double rate = static_cast<double>(global) /
                            static_cast<double>(cfg.compare.seeds.size());
        rates.push_back({{"method", method},
                         {"seeds", cfg.compare.seeds.size()},
                         {"global", global},
                         {"success_rate", rate}});
        std::printf("%s: %zu/%zu runs end in the global basin\n",
                    method.c_str(), global, cfg.compare.seeds.size());
    }
    write_text_file(out_dir / "compare.csv", csv.str());
    write_json_file(out_dir / "compare_summary.json",
                    json{{"seed", cfg.seed},
                         {"config_hash", config_hash_hex(cfg)},
                         {"methods", rates}});
    return 0;
}

}  // namespace contpol

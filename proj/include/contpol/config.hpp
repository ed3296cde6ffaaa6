#pragma once

#include <cstdint>
#include <cstdio>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "contpol/stats.hpp"

namespace contpol {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfgdetail {

inline const json* find_path(const json& root, const std::string& path) {
    const json* cur = &root;
    std::size_t start = 0;
    while (start <= path.size()) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

template <class T>
void read_into(const json& root, const std::string& path, T& out) {
    const json* node = find_path(root, path);
    if (node == nullptr) return;  // keep default
    try {
        out = node->get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + path + "': wrong type (found " +
                          std::string(node->type_name()) + ")");
    }
}

inline void check(bool ok, const std::string& path, const std::string& why) {
    if (!ok) throw ConfigError("config field '" + path + "': " + why);
}

}  // namespace cfgdetail

struct EnvConfig {
    std::vector<double> profile_coefficients{1.44, -0.73, -0.44, 0.08, 0.04};
    double x_min = -4.0, x_max = 5.0;
    double mass = 0.5, gravity = 9.81, damping = 0.65, dt = 0.1;
    double a_min = -10.0, a_max = 10.0;
    double noise_std = 1.0;
    int euler_substeps = 10;
    double x_initial = -3.0;
    double discount = 0.99;
    int horizon = 100;
};

struct SweepConfig {
    double theta_min = -10.0, theta_max = 2.0, pitch = 0.2;
    std::vector<double> sigma_list{0.0, 0.5, 1.0, 2.0, 4.0};
    std::size_t n_rollouts = 2000;
};

struct VerifyConfig {
    std::size_t n_rollouts = 10000;   // per side of each return-equality check
    std::size_t m_actions = 10000;    // mixture action samples per state
    std::vector<double> theta_grid{-6.0, -5.0, -4.0, -3.0, -2.0,
                                   -1.5, -1.0, -0.5, 0.0};
    double equality_k = 3.0;   // combined-stderr multiplier
    double moment_k = 4.0;     // moment-check multiplier
    double constant_lambda = 0.04;
    double radial_sigma_ref = 0.5;
    double time_decay_lambda0 = 1.0;
    double time_decay_beta = 0.1;
};

struct ScheduleConfig {
    double scale0 = 16.0;
    double rho = 0.64;
    int stages = 20;
};

struct OptimizeConfig {
    std::string method = "continuation";  // continuation | entropy_reg | deterministic
    double theta0 = -0.4;
    // Base covariance scaled by the schedule.  state_radial keeps the induced
    // action noise near sqrt(scale) * cov_param across states; constant uses
    // cov_param as the raw parameter variance.
    std::string cov_kind = "state_radial";  // state_radial | constant
    double cov_param = 1.0;
    ScheduleConfig schedule;
    int steps_per_stage = 10;
    double stepsize = 0.02;
    std::size_t n_rollouts = 200;
    double grad_clip = 20.0;
    // deterministic baseline
    int det_iterations = 200;
    double det_stepsize = 0.005;
    std::size_t det_n_rollouts = 100;
    double det_grad_clip = 50.0;
    // entropy-regularized baseline
    double sigma0 = 1.0;
    double entropy_coef0 = 0.5;
    double entropy_decay = 0.98;
    int ent_iterations = 200;
    double ent_stepsize = 0.02;
};

struct CompareConfig {
    std::vector<std::uint64_t> seeds{0, 1, 2,  3,  4,  5,  6,  7,  8,  9,
                                     10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
    std::vector<std::string> methods{"continuation", "deterministic"};
};

// Basin ground truth: the sigma' = 0 return curve of the noise-free
// environment is deterministic, so two rollouts per grid point already give an
// exact mean (and a zero spread check).
struct OracleConfig {
    double pitch = 0.01;
    std::size_t n_rollouts = 2;
};

struct ExperimentConfig {
    std::uint64_t seed = 12345;
    int threads = 1;
    EnvConfig env;
    SweepConfig sweep;
    VerifyConfig verify;
    OptimizeConfig optimize;
    CompareConfig compare;
    OracleConfig oracle;
};

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["env"] = {{"profile_coefficients", c.env.profile_coefficients},
                {"x_min", c.env.x_min},
                {"x_max", c.env.x_max},
                {"mass", c.env.mass},
                {"gravity", c.env.gravity},
                {"damping", c.env.damping},
                {"dt", c.env.dt},
                {"a_min", c.env.a_min},
                {"a_max", c.env.a_max},
                {"noise_std", c.env.noise_std},
                {"euler_substeps", c.env.euler_substeps},
                {"x_initial", c.env.x_initial},
                {"discount", c.env.discount},
                {"horizon", c.env.horizon}};
    j["sweep"] = {{"theta_min", c.sweep.theta_min},
                  {"theta_max", c.sweep.theta_max},
                  {"pitch", c.sweep.pitch},
                  {"sigma_list", c.sweep.sigma_list},
                  {"n_rollouts", c.sweep.n_rollouts}};
    j["verify"] = {{"n_rollouts", c.verify.n_rollouts},
                   {"m_actions", c.verify.m_actions},
                   {"theta_grid", c.verify.theta_grid},
                   {"equality_k", c.verify.equality_k},
                   {"moment_k", c.verify.moment_k},
                   {"constant_lambda", c.verify.constant_lambda},
                   {"radial_sigma_ref", c.verify.radial_sigma_ref},
                   {"time_decay_lambda0", c.verify.time_decay_lambda0},
                   {"time_decay_beta", c.verify.time_decay_beta}};
    j["optimize"] = {{"method", c.optimize.method},
                     {"theta0", c.optimize.theta0},
                     {"cov_kind", c.optimize.cov_kind},
                     {"cov_param", c.optimize.cov_param},
                     {"schedule",
                      {{"scale0", c.optimize.schedule.scale0},
                       {"rho", c.optimize.schedule.rho},
                       {"stages", c.optimize.schedule.stages}}},
                     {"steps_per_stage", c.optimize.steps_per_stage},
                     {"stepsize", c.optimize.stepsize},
                     {"n_rollouts", c.optimize.n_rollouts},
                     {"grad_clip", c.optimize.grad_clip},
                     {"det_iterations", c.optimize.det_iterations},
                     {"det_stepsize", c.optimize.det_stepsize},
                     {"det_n_rollouts", c.optimize.det_n_rollouts},
                     {"det_grad_clip", c.optimize.det_grad_clip},
                     {"sigma0", c.optimize.sigma0},
                     {"entropy_coef0", c.optimize.entropy_coef0},
                     {"entropy_decay", c.optimize.entropy_decay},
                     {"ent_iterations", c.optimize.ent_iterations},
                     {"ent_stepsize", c.optimize.ent_stepsize}};
    j["compare"] = {{"seeds", c.compare.seeds}, {"methods", c.compare.methods}};
    j["oracle"] = {{"pitch", c.oracle.pitch},
                   {"n_rollouts", c.oracle.n_rollouts}};
    return j;
}

inline ExperimentConfig config_from_json(const json& j) {
    using cfgdetail::check;
    using cfgdetail::read_into;
    ExperimentConfig c;
    read_into(j, "seed", c.seed);
    read_into(j, "threads", c.threads);
    check(c.threads >= 1, "threads", "must be >= 1");

    read_into(j, "env.profile_coefficients", c.env.profile_coefficients);
    check(c.env.profile_coefficients.size() >= 3, "env.profile_coefficients",
          "need a polynomial of degree >= 2");
    read_into(j, "env.x_min", c.env.x_min);
    read_into(j, "env.x_max", c.env.x_max);
    check(c.env.x_min < c.env.x_max, "env.x_max", "must exceed env.x_min");
    read_into(j, "env.mass", c.env.mass);
    check(c.env.mass > 0.0, "env.mass", "must be positive");
    read_into(j, "env.gravity", c.env.gravity);
    read_into(j, "env.damping", c.env.damping);
    check(c.env.damping >= 0.0, "env.damping", "must be nonnegative");
    read_into(j, "env.dt", c.env.dt);
    check(c.env.dt > 0.0, "env.dt", "must be positive");
    read_into(j, "env.a_min", c.env.a_min);
    read_into(j, "env.a_max", c.env.a_max);
    check(c.env.a_min < c.env.a_max, "env.a_max", "must exceed env.a_min");
    read_into(j, "env.noise_std", c.env.noise_std);
    check(c.env.noise_std >= 0.0, "env.noise_std", "must be nonnegative");
    read_into(j, "env.euler_substeps", c.env.euler_substeps);
    check(c.env.euler_substeps >= 1, "env.euler_substeps", "must be >= 1");
    read_into(j, "env.x_initial", c.env.x_initial);
    read_into(j, "env.discount", c.env.discount);
    check(c.env.discount >= 0.0 && c.env.discount < 1.0, "env.discount",
          "must be in [0, 1)");
    read_into(j, "env.horizon", c.env.horizon);
    check(c.env.horizon >= 1, "env.horizon", "must be >= 1");

    read_into(j, "sweep.theta_min", c.sweep.theta_min);
    read_into(j, "sweep.theta_max", c.sweep.theta_max);
    check(c.sweep.theta_min < c.sweep.theta_max, "sweep.theta_max",
          "must exceed sweep.theta_min");
    read_into(j, "sweep.pitch", c.sweep.pitch);
    check(c.sweep.pitch > 0.0, "sweep.pitch", "must be positive");
    read_into(j, "sweep.sigma_list", c.sweep.sigma_list);
    check(!c.sweep.sigma_list.empty(), "sweep.sigma_list", "must be nonempty");
    for (double s : c.sweep.sigma_list)
        check(s >= 0.0, "sweep.sigma_list", "entries must be nonnegative");
    read_into(j, "sweep.n_rollouts", c.sweep.n_rollouts);
    check(c.sweep.n_rollouts >= 2, "sweep.n_rollouts", "must be >= 2");

    read_into(j, "verify.n_rollouts", c.verify.n_rollouts);
    check(c.verify.n_rollouts >= 2, "verify.n_rollouts", "must be >= 2");
    read_into(j, "verify.m_actions", c.verify.m_actions);
    check(c.verify.m_actions >= 2, "verify.m_actions", "must be >= 2");
    read_into(j, "verify.theta_grid", c.verify.theta_grid);
    check(!c.verify.theta_grid.empty(), "verify.theta_grid", "must be nonempty");
    read_into(j, "verify.equality_k", c.verify.equality_k);
    check(c.verify.equality_k > 0.0, "verify.equality_k", "must be positive");
    read_into(j, "verify.moment_k", c.verify.moment_k);
    check(c.verify.moment_k > 0.0, "verify.moment_k", "must be positive");
    read_into(j, "verify.constant_lambda", c.verify.constant_lambda);
    check(c.verify.constant_lambda >= 0.0, "verify.constant_lambda",
          "must be nonnegative");
    read_into(j, "verify.radial_sigma_ref", c.verify.radial_sigma_ref);
    read_into(j, "verify.time_decay_lambda0", c.verify.time_decay_lambda0);
    read_into(j, "verify.time_decay_beta", c.verify.time_decay_beta);

    read_into(j, "optimize.method", c.optimize.method);
    check(c.optimize.method == "continuation" ||
              c.optimize.method == "entropy_reg" ||
              c.optimize.method == "deterministic",
          "optimize.method",
          "must be one of continuation, entropy_reg, deterministic");
    read_into(j, "optimize.theta0", c.optimize.theta0);
    read_into(j, "optimize.cov_kind", c.optimize.cov_kind);
    check(c.optimize.cov_kind == "state_radial" ||
              c.optimize.cov_kind == "constant",
          "optimize.cov_kind", "must be state_radial or constant");
    read_into(j, "optimize.cov_param", c.optimize.cov_param);
    check(c.optimize.cov_param > 0.0, "optimize.cov_param",
          "must be positive");
    read_into(j, "optimize.schedule.scale0", c.optimize.schedule.scale0);
    check(c.optimize.schedule.scale0 > 0.0, "optimize.schedule.scale0",
          "must be positive");
    read_into(j, "optimize.schedule.rho", c.optimize.schedule.rho);
    check(c.optimize.schedule.rho > 0.0 && c.optimize.schedule.rho < 1.0,
          "optimize.schedule.rho", "must be in (0, 1)");
    read_into(j, "optimize.schedule.stages", c.optimize.schedule.stages);
    check(c.optimize.schedule.stages >= 1, "optimize.schedule.stages",
          "must be >= 1");
    read_into(j, "optimize.steps_per_stage", c.optimize.steps_per_stage);
    check(c.optimize.steps_per_stage >= 1, "optimize.steps_per_stage",
          "must be >= 1");
    read_into(j, "optimize.stepsize", c.optimize.stepsize);
    check(c.optimize.stepsize >= 0.0, "optimize.stepsize",
          "must be nonnegative");
    read_into(j, "optimize.n_rollouts", c.optimize.n_rollouts);
    check(c.optimize.n_rollouts >= 2, "optimize.n_rollouts", "must be >= 2");
    read_into(j, "optimize.grad_clip", c.optimize.grad_clip);
    check(c.optimize.grad_clip > 0.0, "optimize.grad_clip", "must be positive");
    read_into(j, "optimize.det_iterations", c.optimize.det_iterations);
    check(c.optimize.det_iterations >= 1, "optimize.det_iterations",
          "must be >= 1");
    read_into(j, "optimize.det_stepsize", c.optimize.det_stepsize);
    read_into(j, "optimize.det_n_rollouts", c.optimize.det_n_rollouts);
    check(c.optimize.det_n_rollouts >= 2, "optimize.det_n_rollouts",
          "must be >= 2");
    read_into(j, "optimize.det_grad_clip", c.optimize.det_grad_clip);
    read_into(j, "optimize.sigma0", c.optimize.sigma0);
    check(c.optimize.sigma0 > 0.0, "optimize.sigma0", "must be positive");
    read_into(j, "optimize.entropy_coef0", c.optimize.entropy_coef0);
    read_into(j, "optimize.entropy_decay", c.optimize.entropy_decay);
    check(c.optimize.entropy_decay > 0.0 && c.optimize.entropy_decay <= 1.0,
          "optimize.entropy_decay", "must be in (0, 1]");
    read_into(j, "optimize.ent_iterations", c.optimize.ent_iterations);
    read_into(j, "optimize.ent_stepsize", c.optimize.ent_stepsize);

    read_into(j, "compare.seeds", c.compare.seeds);
    check(!c.compare.seeds.empty(), "compare.seeds", "must be nonempty");
    read_into(j, "compare.methods", c.compare.methods);
    for (const std::string& m : c.compare.methods)
        check(m == "continuation" || m == "entropy_reg" || m == "deterministic",
              "compare.methods", "unknown method '" + m + "'");

    read_into(j, "oracle.pitch", c.oracle.pitch);
    check(c.oracle.pitch > 0.0, "oracle.pitch", "must be positive");
    read_into(j, "oracle.n_rollouts", c.oracle.n_rollouts);
    check(c.oracle.n_rollouts >= 2, "oracle.n_rollouts", "must be >= 2");
    return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return config_from_json(j);
}

// Stable fingerprint of the effective configuration (defaults applied);
// nlohmann::json serializes object keys in sorted order, so the dump is
// canonical.  The thread count is excluded: it is an execution detail that
// never changes results, so runs at different thread counts fingerprint (and
// byte-compare) the same.
inline std::string config_hash_hex(const ExperimentConfig& c) {
    json j = to_json(c);
    j.erase("threads");
    const std::uint64_t h = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace contpol

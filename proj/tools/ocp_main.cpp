#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocp/config.hpp"
#include "ocp/runner.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string alg;
    std::string env;
    int k = -1;
    long long horizon = -1;
    double alpha = -1, c = -1, rho = -1, delta = -1;
    long long seed = -1;
    int seeds = -1;
    std::string out;
    double gamma_override = -1, eta_override = -1, beta_override = -1;
};

void add_common_flags(CLI::App* app, CliOverrides& o) {
    app->add_option("--config", o.config_path, "config file (flat key = value document)");
    app->add_option("--alg", o.alg, "algorithm: exp3p, bandit, unlock, unlock-plus");
    app->add_option("--env", o.env, "environment: iid, exponent, shift, adaptive, replay:PATH");
    app->add_option("--K", o.k, "number of grid thresholds");
    app->add_option("--T", o.horizon, "horizon");
    app->add_option("--alpha", o.alpha, "target miscoverage level in (0, 0.5)");
    app->add_option("--c", o.c, "inefficiency trade-off weight");
    app->add_option("--rho", o.rho, "decay exponent, scale = T^-rho");
    app->add_option("--delta", o.delta, "bound confidence level in (0, 1)");
    app->add_option("--seed", o.seed, "base seed");
    app->add_option("--seeds", o.seeds, "number of runs in the suite");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--gamma-override", o.gamma_override, "fix gamma instead of the theorem schedule");
    app->add_option("--eta-override", o.eta_override, "fix eta instead of the theorem schedule");
    app->add_option("--beta-override", o.beta_override, "fix beta instead of the theorem schedule");
}

ocp::RunConfig build_config(const CliOverrides& o, bool allow_empty_horizon = false) {
    ocp::RunConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw std::runtime_error("cannot open config '" + o.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = ocp::parse_config(buf.str());
    }
    // Flags win over file values.
    if (!o.alg.empty()) {
        auto v = ocp::variant_from_name(o.alg);
        if (!v) throw ocp::ConfigError("--alg", "must be one of exp3p, bandit, unlock, unlock-plus");
        cfg.algorithm = *v;
    }
    if (!o.env.empty()) {
        if (o.env == "iid") cfg.env.kind = ocp::EnvKind::iid;
        else if (o.env == "exponent") cfg.env.kind = ocp::EnvKind::exponent_schedule;
        else if (o.env == "shift") cfg.env.kind = ocp::EnvKind::covariate_shift;
        else if (o.env == "adaptive") cfg.env.kind = ocp::EnvKind::adaptive;
        else if (o.env.rfind("replay:", 0) == 0) {
            cfg.env.kind = ocp::EnvKind::replay;
            cfg.env.replay_path = o.env.substr(7);
        } else {
            throw ocp::ConfigError("--env", "must be iid, exponent, shift, adaptive or replay:PATH");
        }
    }
    if (o.k >= 0) cfg.k = o.k;
    if (o.horizon >= 0) cfg.horizon = o.horizon;
    if (o.alpha >= 0) cfg.alpha = o.alpha;
    if (o.c >= 0) cfg.c = o.c;
    if (o.rho >= 0) cfg.rho = o.rho;
    if (o.delta >= 0) cfg.delta = o.delta;
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.seeds >= 0) cfg.seed_count = o.seeds;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.gamma_override >= 0) cfg.gamma_override = o.gamma_override;
    if (o.eta_override >= 0) cfg.eta_override = o.eta_override;
    if (o.beta_override >= 0) cfg.beta_override = o.beta_override;
    if (!(allow_empty_horizon && cfg.horizon == 0)) ocp::validate_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online conformal prediction under adversarial semi-bandit feedback"};
    app.require_subcommand(1);

    CliOverrides run_o, sweep_o, replay_o;
    std::string sweep_axis;
    std::vector<std::string> sweep_values;
    std::string check_dir;
    std::string replay_path;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a multi-seed suite");
    add_common_flags(run_cmd, run_o);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    add_common_flags(sweep_cmd, sweep_o);
    sweep_cmd->add_option("--axis", sweep_axis, "parameter to sweep: K, alpha, c, T, algorithm")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "axis values")->required()->delimiter(',');

    CLI::App* check_cmd = app.add_subcommand("check", "re-validate Lemma-1/bounds on existing logs");
    check_cmd->add_option("dir", check_dir, "output directory of a previous run")->required();

    CLI::App* replay_cmd = app.add_subcommand("make-replay", "materialize a synthetic stream");
    add_common_flags(replay_cmd, replay_o);
    replay_cmd->add_option("--path", replay_path, "replay file to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return ocp::cmd_run(build_config(run_o));
        if (sweep_cmd->parsed()) return ocp::cmd_sweep(build_config(sweep_o), sweep_axis, sweep_values);
        if (check_cmd->parsed()) return ocp::cmd_check(check_dir);
        if (replay_cmd->parsed()) return ocp::cmd_make_replay(build_config(replay_o, true), replay_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

#include "ocp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocp {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

RunLog run(Environment& env, Variant variant, const ThresholdGrid& grid, const LossParams& params,
           const HyperParams& hyper, long long horizon, std::uint64_t seed,
           const RunOptions& options) {
    if (horizon < 1) throw std::invalid_argument("run: horizon must be >= 1");
    validate_hyper(hyper);

    const int k = grid.size();
    LearnerState state(variant, hyper, k);
    Rng learner_rng(learner_stream_seed(seed));

    RunLog log;
    log.k = k;
    log.steps.reserve(static_cast<std::size_t>(horizon));
    log.cum_loss_per_arm.assign(static_cast<std::size_t>(k), 0.0);

    for (long long t = 1; t <= horizon; ++t) {
        const Strategy strategy = compute_strategy(state);
        const int arm = sample_arm(strategy, learner_rng);

        StepTruth truth = env.step(t);
        validate_truth(truth, k);

        const int covered = grid.covered_count(truth.f_star);
        const int m = arm < covered ? 0 : 1;

        Feedback feedback{m, m == 0 ? std::optional<double>(truth.f_star) : std::nullopt};
        learner_step(state, strategy, arm, feedback, grid, params, options.force_singleton_unlock);

        StepRecord rec;
        rec.t = t;
        rec.arm = arm;
        rec.pi = grid.value(arm);
        rec.miscovered = m;
        rec.set_size = truth.set_sizes[static_cast<std::size_t>(arm)];
        rec.feedback_had_score = feedback.revealed_score.has_value();

        std::vector<double> row(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            row[static_cast<std::size_t>(i)] = loss_value(grid.value(i), i < covered ? 0 : 1, params);
            log.cum_loss_per_arm[static_cast<std::size_t>(i)] += row[static_cast<std::size_t>(i)];
        }
        rec.loss = row[static_cast<std::size_t>(arm)];

        double mass = 0.0;
        for (int i = 0; i < covered; ++i) mass += strategy.probs[static_cast<std::size_t>(i)];
        rec.covered_mass = mass;

        if (options.record_strategy_digest)
            rec.strategy_digest = fnv1a(strategy.probs.data(), strategy.probs.size() * sizeof(double));
        if (options.keep_loss_rows) rec.loss_row = std::move(row);
        if (options.keep_strategies) rec.strategy = strategy.probs;

        env.observe(arm, rec.pi, m);
        log.steps.push_back(std::move(rec));

        for (double g : state.cum_gain)
            if (!std::isfinite(g)) throw std::runtime_error("run: non-finite learner state");
    }
    return log;
}

double miscoverage_rate(const RunLog& log) {
    if (log.steps.empty()) throw std::invalid_argument("miscoverage_rate: empty log");
    long long n1 = 0;
    for (const auto& s : log.steps) n1 += s.miscovered;
    return static_cast<double>(n1) / static_cast<double>(log.steps.size());
}

double inefficiency(const RunLog& log) {
    if (log.steps.empty()) throw std::invalid_argument("inefficiency: empty log");
    double total = 0.0;
    for (const auto& s : log.steps) total += static_cast<double>(s.set_size);
    return total / static_cast<double>(log.steps.size());
}

int best_arm_index(const RunLog& log) {
    if (log.cum_loss_per_arm.empty()) throw std::invalid_argument("best_arm_index: missing loss sums");
    int best = 0;
    for (int i = 1; i < log.k; ++i)
        if (log.cum_loss_per_arm[static_cast<std::size_t>(i)] <
            log.cum_loss_per_arm[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

double regret(const RunLog& log) {
    if (log.steps.empty() || log.cum_loss_per_arm.empty())
        throw std::invalid_argument("regret: missing loss rows");
    double played = 0.0;
    for (const auto& s : log.steps) played += s.loss;
    return played - log.cum_loss_per_arm[static_cast<std::size_t>(best_arm_index(log))];
}

CmcResult c_mc(const RunLog& log, const LossParams& params) {
    if (log.steps.empty()) throw std::invalid_argument("c_mc: empty log");
    const double tt = static_cast<double>(log.steps.size());
    const double a0 = inefficiency_term(0.0, 0, params);
    double a_sum = 0.0;
    long long n1 = 0;
    for (const auto& s : log.steps) {
        a_sum += inefficiency_term(s.pi, s.miscovered, params);
        n1 += s.miscovered;
    }
    const long long n0 = static_cast<long long>(log.steps.size()) - n1;
    CmcResult out;
    out.c_gap_scaled =
        n1 == 0 ? 0.0
                : (1.0 - params.alpha) / params.alpha -
                      static_cast<double>(n0) / static_cast<double>(n1);
    const double count_term =
        n1 == 0 ? 0.0
                : (static_cast<double>(n1) * (1.0 - params.alpha) -
                   params.alpha * static_cast<double>(n0)) /
                      tt;
    out.c_mc = (tt * a0 - a_sum) / tt + count_term;
    return out;
}

Lemma1Result lemma1_check(const RunLog& log, const LossParams& params) {
    Lemma1Result r;
    const double tt = static_cast<double>(log.steps.size());
    r.lhs = miscoverage_rate(log) - params.alpha;
    r.rhs = regret(log) / tt + c_mc(log, params).c_mc;
    r.slack = r.rhs - r.lhs;
    r.pass = r.slack >= -1e-9;
    return r;
}

BoundResult theorem_bound_rhs(Variant variant, int k, long long horizon, double delta,
                              const LossParams& params, const RunLog& log) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("theorem_bound_rhs: delta outside (0, 1)");
    const double kk = static_cast<double>(k);
    const double tt = static_cast<double>(horizon);
    const double lnk = std::log(kk);
    const double ln_inv_delta = std::log(1.0 / delta);

    BoundResult out;
    double per_round = 0.0;
    if (variant == Variant::unlock_plus) {
        // C_t = 1 + {1 on coverage, |locked arms| on miscoverage}
        //         + (miscovered mass) / (covered mass), averaged and capped at K.
        double ct_sum = 0.0;
        for (const auto& s : log.steps) {
            const double ratio = (1.0 - s.covered_mass) / s.covered_mass;
            ct_sum += 1.0 + (s.miscovered == 0 ? 1.0 : static_cast<double>(s.arm)) + ratio;
        }
        out.c_constant = std::min(ct_sum / static_cast<double>(log.steps.size()), kk);
        per_round = std::sqrt(out.c_constant * lnk / tt) + 4.15 * std::sqrt(kk * lnk / tt) +
                    std::sqrt(kk / (tt * lnk)) * ln_inv_delta + 2.0 * params.scale;
    } else {
        per_round = 5.15 * std::sqrt(kk * lnk / tt) + std::sqrt(kk / (tt * lnk)) * ln_inv_delta;
        if (variant == Variant::unlock) per_round += params.scale;
    }
    out.value = params.span() * per_round + c_mc(log, params).c_mc;
    out.vacuous = out.value >= 1.0 - params.alpha;
    return out;
}

RunSummary summarize(const RunLog& log, const LossParams& params, Variant variant, int k,
                     long long horizon, double delta, std::uint64_t seed,
                     const std::string& config_digest) {
    RunSummary s;
    s.mc = miscoverage_rate(log);
    s.ineff = inefficiency(log);
    s.regret = regret(log);
    const CmcResult cm = c_mc(log, params);
    s.c_mc = cm.c_mc;
    s.c_gap_scaled = cm.c_gap_scaled;
    const BoundResult b = theorem_bound_rhs(variant, k, horizon, delta, params, log);
    s.bound_rhs = b.value;
    s.bound_vacuous = b.vacuous;
    const Lemma1Result l = lemma1_check(log, params);
    s.lemma_slack = l.slack;
    s.lemma_pass = l.pass;
    s.seed = seed;
    s.config_digest = config_digest;
    return s;
}

}  // namespace ocp

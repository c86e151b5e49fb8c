#include "ocp/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ocp {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::exp3p: return "exp3p";
        case Variant::bandit: return "bandit";
        case Variant::unlock: return "unlock";
        case Variant::unlock_plus: return "unlock-plus";
    }
    return "?";
}

std::optional<Variant> variant_from_name(const std::string& name) {
    if (name == "exp3p") return Variant::exp3p;
    if (name == "bandit") return Variant::bandit;
    if (name == "unlock") return Variant::unlock;
    if (name == "unlock-plus") return Variant::unlock_plus;
    return std::nullopt;
}

HyperParams theorem_schedule(int k, long long horizon) {
    if (k < 2) throw std::invalid_argument("theorem_schedule: K must be >= 2");
    if (horizon < 1) throw std::invalid_argument("theorem_schedule: horizon must be >= 1");
    const double kk = static_cast<double>(k);
    const double tt = static_cast<double>(horizon);
    const double lnk = std::log(kk);
    HyperParams h{};
    h.beta = std::sqrt(lnk / (kk * tt));
    h.eta = 0.95 * std::sqrt(lnk / (kk * tt));
    double gamma = 1.05 * std::sqrt(kk * lnk / tt);
    if (gamma > 0.999) {
        gamma = 0.999;
        h.gamma_clamped = true;
    }
    h.gamma = gamma;
    return h;
}

void validate_hyper(const HyperParams& hyper) {
    if (!(hyper.eta > 0.0)) throw std::invalid_argument("HyperParams: eta must be > 0");
    if (!(hyper.gamma >= 0.0 && hyper.gamma < 1.0)) throw std::invalid_argument("HyperParams: gamma must lie in [0, 1)");
    if (!(hyper.beta > 0.0 && hyper.beta <= 1.0)) throw std::invalid_argument("HyperParams: beta must lie in (0, 1]");
}

Strategy compute_strategy(const LearnerState& state) {
    const int k = state.arm_count();
    const double eta = state.hyper.eta;
    const double gamma = state.hyper.gamma;
    double max_score = -std::numeric_limits<double>::infinity();
    for (double g : state.cum_gain) max_score = std::max(max_score, eta * g);
    Strategy s;
    s.probs.resize(static_cast<std::size_t>(k));
    double z = 0.0;
    for (int i = 0; i < k; ++i) {
        double w = std::exp(eta * state.cum_gain[static_cast<std::size_t>(i)] - max_score);
        s.probs[static_cast<std::size_t>(i)] = w;
        z += w;
    }
    const double mix = gamma / k;
    for (double& p : s.probs) p = (1.0 - gamma) * (p / z) + mix;
    return s;
}

int pick_arm(const Strategy& strategy, double u) {
    double cum = 0.0;
    const int k = strategy.size();
    for (int i = 0; i < k; ++i) {
        cum += strategy.probs[static_cast<std::size_t>(i)];
        if (u <= cum) return i;
    }
    return k - 1;
}

int sample_arm(const Strategy& strategy, Rng& rng) { return pick_arm(strategy, rng.u01()); }

ArmRange unlocking_set(int arm, int m, int k) {
    if (arm < 0 || arm >= k) throw std::invalid_argument("unlocking_set: arm out of range");
    return m == 0 ? ArmRange{0, k} : ArmRange{arm, k};
}

ArmRange singleton_set(int arm) { return ArmRange{arm, arm + 1}; }

std::vector<double> estimator_bandit(int arm, double gain, const Strategy& strategy, double beta) {
    const int k = strategy.size();
    std::vector<double> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = beta / strategy.probs[static_cast<std::size_t>(i)];
    // Same arithmetic shape as estimator_unlock with a singleton weighted
    // set, so the bandit-feedback reduction is exact.
    out[static_cast<std::size_t>(arm)] = gain / strategy.probs[static_cast<std::size_t>(arm)] +
                                         beta / strategy.probs[static_cast<std::size_t>(arm)];
    return out;
}

std::vector<double> estimator_unlock(const std::vector<double>& gains, ArmRange weighted,
                                     const Strategy& strategy, double beta) {
    const int k = strategy.size();
    if (weighted.count() < 1 || weighted.begin < 0 || weighted.end > k)
        throw std::logic_error("estimator_unlock: empty or invalid weighted set");
    double mass = 0.0;
    for (int i = weighted.begin; i < weighted.end; ++i) mass += strategy.probs[static_cast<std::size_t>(i)];
    std::vector<double> out(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double p = strategy.probs[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] =
            weighted.contains(i) ? gains[static_cast<std::size_t>(i)] / mass + beta / p : beta / p;
    }
    return out;
}

std::vector<double> estimator_unlock_plus(int m, const std::vector<double>& gains,
                                          const std::vector<double>& pseudo_gains, ArmRange unlocked,
                                          int covered_count, const Strategy& strategy, double beta) {
    const int k = strategy.size();
    std::vector<double> prefix(static_cast<std::size_t>(k));
    double cum = 0.0;
    for (int i = 0; i < k; ++i) {
        cum += strategy.probs[static_cast<std::size_t>(i)];
        prefix[static_cast<std::size_t>(i)] = cum;
    }
    std::vector<double> out(static_cast<std::size_t>(k));
    if (m == 0) {
        if (covered_count < 1) throw std::logic_error("estimator_unlock_plus: empty covered set on coverage");
        const double covered_mass = prefix[static_cast<std::size_t>(covered_count - 1)];
        const double covered_bonus = (1.0 + 1.0 / covered_mass) * beta;
        for (int i = 0; i < k; ++i) {
            out[static_cast<std::size_t>(i)] =
                i < covered_count
                    ? gains[static_cast<std::size_t>(i)] / covered_mass + covered_bonus
                    : gains[static_cast<std::size_t>(i)] + beta / prefix[static_cast<std::size_t>(i)];
        }
    } else {
        for (int i = 0; i < k; ++i) {
            out[static_cast<std::size_t>(i)] =
                unlocked.contains(i)
                    ? gains[static_cast<std::size_t>(i)] + beta / prefix[static_cast<std::size_t>(i)]
                    : pseudo_gains[static_cast<std::size_t>(i)] +
                          (1.0 + 1.0 / strategy.probs[static_cast<std::size_t>(i)]) * beta;
        }
    }
    return out;
}

void apply_estimate(LearnerState& state, const std::vector<double>& estimate) {
    if (estimate.size() != state.cum_gain.size())
        throw std::invalid_argument("apply_estimate: estimate length mismatch");
    for (double e : estimate)
        if (!std::isfinite(e)) throw std::invalid_argument("apply_estimate: non-finite estimate entry");
    for (std::size_t i = 0; i < estimate.size(); ++i) state.cum_gain[i] += estimate[i];
}

std::vector<double> learner_step(LearnerState& state, const Strategy& strategy, int arm,
                                 const Feedback& feedback, const ThresholdGrid& grid,
                                 const LossParams& params, bool force_singleton) {
    const int k = grid.size();
    if (arm < 0 || arm >= k) throw std::invalid_argument("learner_step: arm out of range");
    if (strategy.size() != k) throw std::invalid_argument("learner_step: strategy length mismatch");
    if (feedback.revealed_score.has_value() != (feedback.miscovered == 0))
        throw std::invalid_argument("learner_step: score revealed iff covered");

    const int m = feedback.miscovered;
    std::vector<double> estimate;

    const bool bandit_feedback =
        state.variant == Variant::exp3p || state.variant == Variant::bandit || force_singleton;
    if (force_singleton && state.variant == Variant::unlock_plus)
        throw std::invalid_argument("learner_step: singleton reduction is not defined for unlock-plus");

    if (bandit_feedback) {
        const double gain = normalized_gain(loss_value(grid.value(arm), m, params), params);
        if (state.variant == Variant::unlock) {
            std::vector<double> gains(static_cast<std::size_t>(k), 0.0);
            gains[static_cast<std::size_t>(arm)] = gain;
            estimate = estimator_unlock(gains, singleton_set(arm), strategy, state.hyper.beta);
        } else {
            estimate = estimator_bandit(arm, gain, strategy, state.hyper.beta);
        }
    } else {
        const ArmRange unlocked = unlocking_set(arm, m, k);
        std::vector<double> gains(static_cast<std::size_t>(k), 0.0);
        int covered_count = 0;
        if (m == 0) {
            covered_count = grid.covered_count(*feedback.revealed_score);
            for (int i = 0; i < k; ++i)
                gains[static_cast<std::size_t>(i)] =
                    normalized_gain(loss_value(grid.value(i), i < covered_count ? 0 : 1, params), params);
        } else {
            // Arms at or above the chosen threshold are known to miscover;
            // their losses need no score.
            for (int i = unlocked.begin; i < k; ++i)
                gains[static_cast<std::size_t>(i)] =
                    normalized_gain(loss_value(grid.value(i), 1, params), params);
        }
        if (state.variant == Variant::unlock) {
            const ArmRange weighted = m == 0 ? ArmRange{0, covered_count} : unlocked;
            estimate = estimator_unlock(gains, weighted, strategy, state.hyper.beta);
        } else {
            std::vector<double> pseudo(static_cast<std::size_t>(k), 0.0);
            if (m == 1)
                for (int i = 0; i < unlocked.begin; ++i)
                    pseudo[static_cast<std::size_t>(i)] = pseudo_gain(grid.value(i), params);
            estimate = estimator_unlock_plus(m, gains, pseudo, unlocked, covered_count, strategy,
                                             state.hyper.beta);
        }
    }

    apply_estimate(state, estimate);
    return estimate;
}

}  // namespace ocp

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ocp/grid.hpp"
#include "ocp/loss.hpp"
#include "ocp/rng.hpp"

namespace ocp {

enum class Variant { exp3p, bandit, unlock, unlock_plus };

const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(const std::string& name);

struct HyperParams {
    double eta;    // learning rate, > 0
    double gamma;  // exploration mix, in [0, 1)
    double beta;   // estimator bonus, in (0, 1]
    bool gamma_clamped = false;
};

// beta = sqrt(ln K / (K T)), gamma = 1.05 sqrt(K ln K / T),
// eta = 0.95 sqrt(ln K / (K T)). gamma is clamped to 0.999 (flagged) when
// the formula exceeds it at small horizons.
HyperParams theorem_schedule(int k, long long horizon);

void validate_hyper(const HyperParams& hyper);

struct Strategy {
    std::vector<double> probs;
    int size() const { return static_cast<int>(probs.size()); }
};

struct LearnerState {
    Variant variant;
    HyperParams hyper;
    std::vector<double> cum_gain;  // cumulative estimated gains, one per arm

    LearnerState(Variant variant, HyperParams hyper, int k)
        : variant(variant), hyper(hyper), cum_gain(static_cast<std::size_t>(k), 0.0) {}
    int arm_count() const { return static_cast<int>(cum_gain.size()); }
};

// Exponential weights with uniform mixing:
//   p(pi) = (1 - gamma) * softmax(eta * G)(pi) + gamma / K,
// computed with max-subtraction so cumulative gains of any size are safe.
Strategy compute_strategy(const LearnerState& state);

// Inverse-CDF bucket lookup: smallest arm whose cumulative probability
// reaches the draw. A draw landing exactly on a CDF boundary goes to the
// lower-indexed bucket.
int pick_arm(const Strategy& strategy, double u);

// Samples an arm from a single uniform draw.
int sample_arm(const Strategy& strategy, Rng& rng);

// Contiguous arm index range [begin, end).
struct ArmRange {
    int begin = 0;
    int end = 0;
    bool contains(int i) const { return i >= begin && i < end; }
    int count() const { return end - begin; }
};

// Arms whose miscoverage is inferable this round: all of them on coverage,
// the chosen arm and everything above it on miscoverage.
ArmRange unlocking_set(int arm, int m, int k);

// Bandit-feedback rule: only the chosen arm.
ArmRange singleton_set(int arm);

// Importance-weighted estimate with exploration bonus: the chosen arm gets
// (g + beta) / p, every other arm beta / p.
std::vector<double> estimator_bandit(int arm, double gain, const Strategy& strategy, double beta);

// Arms in `weighted` share one importance weight 1 / sum_{weighted} p and
// keep the per-arm bonus; arms outside get the bonus only. With a singleton
// weighted set this reproduces estimator_bandit bit for bit.
std::vector<double> estimator_unlock(const std::vector<double>& gains, ArmRange weighted,
                                     const Strategy& strategy, double beta);

// Miscoverage-first estimator. On coverage, covered arms are upweighted by
// the covered probability mass and take the larger bonus; the rest take the
// raw gain with a prefix-mass bonus. On miscoverage, unlocked arms take the
// raw gain with the prefix-mass bonus while locked arms fall back to the
// pseudo-gain with the largest bonus. Prefix sums are inclusive of the arm.
std::vector<double> estimator_unlock_plus(int m, const std::vector<double>& gains,
                                          const std::vector<double>& pseudo_gains, ArmRange unlocked,
                                          int covered_count, const Strategy& strategy, double beta);

// Element-wise accumulation into the cumulative gains; rejects non-finite
// entries.
void apply_estimate(LearnerState& state, const std::vector<double>& estimate);

// The masked, learner-visible view of a round.
struct Feedback {
    int miscovered;                       // m_t(pi_t)
    std::optional<double> revealed_score; // f_star, present iff miscovered == 0
};

// One full learner-side update from semi-bandit feedback: evaluates gains on
// the unlocking set, builds the variant's estimate under the strategy that
// sampled the arm, and accumulates it. Returns the estimate.
// `force_singleton` restricts OCP-Unlock to bandit feedback (the reduction
// mode); it is rejected for OCP-Unlock+.
std::vector<double> learner_step(LearnerState& state, const Strategy& strategy, int arm,
                                 const Feedback& feedback, const ThresholdGrid& grid,
                                 const LossParams& params, bool force_singleton = false);

}  // namespace ocp

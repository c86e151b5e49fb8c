#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ocp/environment.hpp"
#include "ocp/learner.hpp"

namespace ocp {

// One logged round. The harness owns full knowledge (the whole loss row and
// the covered probability mass); the learner only ever saw the Feedback.
struct StepRecord {
    long long t = 0;
    int arm = 0;
    double pi = 0.0;
    int miscovered = 0;
    double loss = 0.0;             // loss of the chosen arm
    long long set_size = 0;        // |C_pi_t(x_t)|
    double covered_mass = 0.0;     // sum of p_t over covered arms
    bool feedback_had_score = false;
    std::uint64_t strategy_digest = 0;
    std::vector<double> loss_row;   // all-arm losses; kept only on request
    std::vector<double> strategy;   // p_t; kept only on request
};

struct RunLog {
    int k = 0;
    std::vector<StepRecord> steps;
    std::vector<double> cum_loss_per_arm;  // full-knowledge column sums
};

struct RunOptions {
    bool keep_loss_rows = false;
    bool keep_strategies = false;
    bool force_singleton_unlock = false;  // bandit-feedback reduction for OCP-Unlock
    bool record_strategy_digest = false;
};

// Plays the sequential game for T rounds under the semi-bandit protocol.
// The environment's truth is masked into a Feedback before the learner sees
// it: no score on miscoverage, never any set sizes, never the loss row.
RunLog run(Environment& env, Variant variant, const ThresholdGrid& grid, const LossParams& params,
           const HyperParams& hyper, long long horizon, std::uint64_t seed,
           const RunOptions& options = {});

double miscoverage_rate(const RunLog& log);
double inefficiency(const RunLog& log);

// Cumulative loss of the played arms minus the best fixed arm in hindsight.
double regret(const RunLog& log);
int best_arm_index(const RunLog& log);  // ties toward smaller pi

struct CmcResult {
    double c_mc = 0.0;
    double c_gap_scaled = 0.0;  // C_gap * scale; 0 when no round miscovered
};

// Trajectory offset converting the regret bound into a coverage bound:
// C_mc = (T a(0) - sum_t a(pi_t)) / T + (N1 (1-alpha) - alpha N0) / T,
// the second term taken as 0 when N1 = 0.
CmcResult c_mc(const RunLog& log, const LossParams& params);

struct Lemma1Result {
    bool pass = false;
    double slack = 0.0;  // rhs - lhs
    double lhs = 0.0;    // MC(T) - alpha
    double rhs = 0.0;    // Reg(T)/T + C_mc(T)
};

// Pathwise inequality MC(T) - alpha <= Reg(T)/T + C_mc(T) + 1e-9. Holds on
// every realized trajectory of every learner by construction of the loss.
Lemma1Result lemma1_check(const RunLog& log, const LossParams& params);

struct BoundResult {
    double value = 0.0;     // high-probability upper bound on MC(T) - alpha
    bool vacuous = false;   // value >= 1 - alpha, the largest the LHS can be
    double c_constant = 0.0;  // min(mean C_t, K); meaningful for unlock-plus
};

// Theorem right-hand side at confidence delta for the given variant;
// reporting only.
BoundResult theorem_bound_rhs(Variant variant, int k, long long horizon, double delta,
                              const LossParams& params, const RunLog& log);

struct RunSummary {
    double mc = 0.0;
    double ineff = 0.0;
    double regret = 0.0;
    double c_mc = 0.0;
    double c_gap_scaled = 0.0;
    double bound_rhs = 0.0;
    bool bound_vacuous = false;
    double lemma_slack = 0.0;
    bool lemma_pass = false;
    std::uint64_t seed = 0;
    std::string config_digest;
};

RunSummary summarize(const RunLog& log, const LossParams& params, Variant variant, int k,
                     long long horizon, double delta, std::uint64_t seed,
                     const std::string& config_digest);

}  // namespace ocp

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ocp/grid.hpp"
#include "ocp/rng.hpp"

namespace ocp {

// Full-knowledge record of one round, as the environment sees it. The
// harness masks this into semi-bandit feedback before the learner sees
// anything.
struct StepTruth {
    long long t = 0;
    double f_star = 0.0;                // true-label conformity score
    std::vector<long long> set_sizes;   // |C_pi(x_t)| per grid threshold, nonincreasing
};

void validate_truth(const StepTruth& truth, int k);

// set_sizes[i] = #{scores >= pi_i}.
std::vector<long long> count_at_thresholds(const std::vector<double>& scores, const ThresholdGrid& grid);

enum class EnvKind { iid, exponent_schedule, covariate_shift, adaptive, replay };

const char* env_kind_name(EnvKind kind);

struct EnvSpec {
    EnvKind kind = EnvKind::iid;

    // Classification-style environments (iid, exponent, adaptive).
    int label_count = 1000;  // L, ImageNet-like class count
    double beta_a = 1.0;     // score distribution Beta(a, b); (1, 1) is uniform
    double beta_b = 1.0;

    // exponent_schedule: scores are raised to the phase exponent;
    // phase p is active for t in (phase_ends[p-1], phase_ends[p]].
    std::vector<double> exponents = {1.0 / 6.0, 1.0 / 4.0, 1.0 / 2.0, 1.0 / 1.2, 1.0 / 3.0};
    std::vector<long long> phase_ends = {10000, 20000, 30000, 40000};

    // covariate_shift: regression analogue on a binned response axis; noise
    // scale switches from sigma_pre to sigma_post after the first
    // shift_fraction of the stream.
    double shift_fraction = 1.0 / 3.0;
    double sigma_pre = 0.05;
    double sigma_post = 0.15;
    int bin_count = 20;
    long long horizon = 0;  // needed to place the shift boundary

    // adaptive: threshold tracker targeting the modal recent arm.
    int window = 100;
    double margin = 0.01;

    // replay
    std::string replay_path;

    void validate(const ThresholdGrid& grid) const;
};

class Environment {
public:
    virtual ~Environment() = default;

    // Ground truth for round t (1-based). Stateful: rounds must be requested
    // in order.
    virtual StepTruth step(long long t) = 0;

    // Called by the harness after each round; only adaptive adversaries care.
    virtual void observe(int /*arm*/, double /*pi*/, int /*miscovered*/) {}
};

std::unique_ptr<Environment> make_environment(const EnvSpec& spec, const ThresholdGrid& grid,
                                              std::uint64_t seed);

}  // namespace ocp

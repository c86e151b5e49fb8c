#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ocp/learner.hpp"

using namespace ocp;

namespace {

Strategy uniform_strategy(int k) {
    Strategy s;
    s.probs.assign(static_cast<std::size_t>(k), 1.0 / k);
    return s;
}

void check_valid_strategy(const Strategy& s, double gamma) {
    double sum = 0.0;
    for (double p : s.probs) {
        CHECK(p >= gamma / s.size() - 1e-15);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

}  // namespace

TEST_CASE("theorem schedule values") {
    const auto h = theorem_schedule(200, 50000);
    CHECK(std::abs(h.beta - 7.279e-4) < 2e-6);
    CHECK(std::abs(h.gamma - 0.152859) < 2e-6);
    CHECK(std::abs(h.eta - 6.9154e-4) < 2e-6);
    CHECK(!h.gamma_clamped);
    // Exact formula agreement.
    CHECK(h.beta == std::sqrt(std::log(200.0) / (200.0 * 50000.0)));
    CHECK(h.eta == 0.95 * std::sqrt(std::log(200.0) / (200.0 * 50000.0)));
    CHECK(h.gamma == 1.05 * std::sqrt(200.0 * std::log(200.0) / 50000.0));

    const auto small = theorem_schedule(5, 10);
    CHECK(std::abs(small.gamma - 0.942) < 1e-3);
    CHECK(!small.gamma_clamped);

    const auto clamped = theorem_schedule(200, 100);
    CHECK(clamped.gamma == 0.999);
    CHECK(clamped.gamma_clamped);
}

TEST_CASE("strategy from cumulative gains") {
    LearnerState state(Variant::bandit, {0.1, 0.2, 0.5}, 4);
    const auto s = compute_strategy(state);
    for (double p : s.probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
    check_valid_strategy(s, 0.2);

    LearnerState two(Variant::bandit, {1.0, 0.3, 0.5}, 2);
    two.cum_gain = {0.0, std::log(2.0)};
    const auto s2 = compute_strategy(two);
    CHECK(s2.probs[0] == doctest::Approx(0.383333).epsilon(1e-5));
    CHECK(s2.probs[1] == doctest::Approx(0.616667).epsilon(1e-5));
    check_valid_strategy(s2, 0.3);
}

TEST_CASE("softmax shift invariance") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        LearnerState state(Variant::bandit, {0.3, 0.1, 0.4}, 6);
        for (double& g : state.cum_gain) g = 1e3 * rng.u01();
        const auto base = compute_strategy(state);
        const double shift = 1e3 * (rng.u01() - 0.5);
        for (double& g : state.cum_gain) g += shift;
        const auto shifted = compute_strategy(state);
        for (int i = 0; i < 6; ++i) CHECK(std::abs(base.probs[i] - shifted.probs[i]) <= 1e-12);
    }
}

TEST_CASE("strategy survives huge cumulative gains") {
    LearnerState state(Variant::bandit, {0.01, 0.1, 0.5}, 3);
    state.cum_gain = {1e9, 5e8, 0.0};
    const auto s = compute_strategy(state);
    check_valid_strategy(s, 0.1);
    CHECK(s.probs[0] > s.probs[1]);
}

TEST_CASE("arm picking buckets") {
    Strategy degenerate;
    degenerate.probs = {1.0, 0.0, 0.0};
    CHECK(pick_arm(degenerate, 0.0) == 0);
    CHECK(pick_arm(degenerate, 0.999) == 0);

    const auto u4 = uniform_strategy(4);
    CHECK(pick_arm(u4, 0.30) == 1);
    CHECK(pick_arm(u4, 0.25) == 0);  // boundary goes to the lower bucket
    CHECK(pick_arm(u4, 0.999999) == 3);
}

TEST_CASE("sampling frequencies match the strategy") {
    Strategy s;
    s.probs = {0.1, 0.4, 0.2, 0.3};
    Rng rng(123);
    const int n = 1000000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_arm(s, rng))];
    for (int i = 0; i < 4; ++i) {
        const double p = s.probs[static_cast<std::size_t>(i)];
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(i)]) / n - p) < 3.0 * se);
    }
}

TEST_CASE("unlocking sets") {
    CHECK(unlocking_set(2, 1, 5).begin == 2);
    CHECK(unlocking_set(2, 1, 5).end == 5);
    CHECK(unlocking_set(2, 0, 5).begin == 0);
    CHECK(unlocking_set(2, 0, 5).end == 5);
    CHECK(unlocking_set(4, 1, 5).count() == 1);  // top of grid
    CHECK(singleton_set(3).count() == 1);
}

TEST_CASE("bandit estimator values and expectation identity") {
    const auto p = uniform_strategy(4);
    const auto est = estimator_bandit(2, 0.5, p, 0.1);
    CHECK(est[2] == doctest::Approx(2.4).epsilon(1e-12));
    for (int i : {0, 1, 3}) CHECK(est[static_cast<std::size_t>(i)] == doctest::Approx(0.4).epsilon(1e-12));
    double expectation = 0.0;
    for (int i = 0; i < 4; ++i) expectation += p.probs[static_cast<std::size_t>(i)] * est[static_cast<std::size_t>(i)];
    CHECK(expectation == doctest::Approx(0.5 + 0.1 * 4).epsilon(1e-12));

    const auto zero = estimator_bandit(1, 0.0, p, 0.0);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("unlock estimator hand examples") {
    const auto p = uniform_strategy(4);
    // f_star = 0.5 on {0, 1/3, 2/3, 1}: covered prefix has two arms.
    std::vector<double> gains{0.1, 0.12, 0.0, 0.0};
    const auto est = estimator_unlock(gains, {0, 2}, p, 0.1);
    CHECK(est[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(est[1] == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(est[2] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(est[3] == doctest::Approx(0.4).epsilon(1e-12));

    // Miscoverage at arm 2: unlocking suffix {2, 3}.
    std::vector<double> gains1{0.0, 0.0, 0.004, 0.003};
    const auto est1 = estimator_unlock(gains1, {2, 4}, p, 0.1);
    CHECK(est1[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(est1[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(est1[2] == doctest::Approx(0.408).epsilon(1e-12));
    CHECK(est1[3] == doctest::Approx(0.406).epsilon(1e-12));
}

TEST_CASE("unlock estimator singleton reduction is bit exact") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + static_cast<int>(rng.u01() * 6);
        Strategy p;
        p.probs.resize(static_cast<std::size_t>(k));
        double z = 0.0;
        for (double& v : p.probs) {
            v = 0.05 + rng.u01();
            z += v;
        }
        for (double& v : p.probs) v /= z;
        const int arm = static_cast<int>(rng.u01() * k);
        const double gain = rng.u01();
        const double beta = 0.001 + rng.u01() * 0.5;
        std::vector<double> gains(static_cast<std::size_t>(k), 0.0);
        gains[static_cast<std::size_t>(arm)] = gain;
        const auto a = estimator_bandit(arm, gain, p, beta);
        const auto b = estimator_unlock(gains, singleton_set(arm), p, beta);
        for (int i = 0; i < k; ++i) CHECK(a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("unlock-plus estimator hand examples") {
    const auto p = uniform_strategy(4);
    // Coverage case, f_star = 0.5 on {0, 1/3, 2/3, 1}.
    std::vector<double> gains{0.1, 0.12, 0.004, 0.003};
    const auto est = estimator_unlock_plus(0, gains, {}, {0, 4}, 2, p, 0.1);
    CHECK(est[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(est[1] == doctest::Approx(0.54).epsilon(1e-12));
    CHECK(est[2] == doctest::Approx(0.004 + 0.1 / 0.75).epsilon(1e-12));
    CHECK(est[3] == doctest::Approx(0.103).epsilon(1e-12));

    // Miscoverage at arm 2: locked arms fall back to pseudo-gains.
    std::vector<double> gains1{0.0, 0.0, 0.004, 0.003};
    std::vector<double> pseudo{0.3, 0.28, 0.0, 0.0};
    const auto est1 = estimator_unlock_plus(1, gains1, pseudo, {2, 4}, 0, p, 0.1);
    CHECK(est1[0] == doctest::Approx(0.3 + 0.5).epsilon(1e-12));
    CHECK(est1[1] == doctest::Approx(0.28 + 0.5).epsilon(1e-12));
    CHECK(est1[2] == doctest::Approx(0.004 + 0.1 / 0.75).epsilon(1e-12));
    CHECK(est1[3] == doctest::Approx(0.003 + 0.1).epsilon(1e-12));
}

TEST_CASE("unlock-plus covered arms take the larger exploration offset") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 3 + static_cast<int>(rng.u01() * 5);
        Strategy p;
        p.probs.resize(static_cast<std::size_t>(k));
        double z = 0.0;
        for (double& v : p.probs) {
            v = 0.05 + rng.u01();
            z += v;
        }
        for (double& v : p.probs) v /= z;
        const int covered = 1 + static_cast<int>(rng.u01() * (k - 1));
        const double beta = 0.001 + 0.5 * rng.u01();
        std::vector<double> zero_gain(static_cast<std::size_t>(k), 0.0);
        const auto est = estimator_unlock_plus(0, zero_gain, {}, {0, k}, covered, p, beta);
        double covered_mass = 0.0;
        for (int i = 0; i < covered; ++i) covered_mass += p.probs[static_cast<std::size_t>(i)];
        const double inside_offset = (1.0 + 1.0 / covered_mass) * beta;
        double prefix = covered_mass;
        for (int i = covered; i < k; ++i) {
            prefix += p.probs[static_cast<std::size_t>(i)];
            CHECK(inside_offset > est[static_cast<std::size_t>(i)]);  // est = 0 gain + beta/prefix
            CHECK(est[static_cast<std::size_t>(i)] == doctest::Approx(beta / prefix).epsilon(1e-12));
        }
    }
}

TEST_CASE("unlock-plus miscoverage ordering across the unlocking boundary") {
    const auto grid = ThresholdGrid::uniform(8);
    const auto params = LossParams::make(0.2, 40.0, 0.01);
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        Strategy p;
        p.probs.resize(8);
        double z = 0.0;
        for (double& v : p.probs) {
            v = 0.02 + rng.u01();
            z += v;
        }
        for (double& v : p.probs) v /= z;
        const int arm = 1 + static_cast<int>(rng.u01() * 6);
        const double beta = 0.001 + 0.3 * rng.u01();
        std::vector<double> gains(8, 0.0), pseudo(8, 0.0);
        for (int i = arm; i < 8; ++i)
            gains[static_cast<std::size_t>(i)] = normalized_gain(loss_value(grid.value(i), 1, params), params);
        for (int i = 0; i < arm; ++i) pseudo[static_cast<std::size_t>(i)] = pseudo_gain(grid.value(i), params);
        const auto est = estimator_unlock_plus(1, gains, pseudo, {arm, 8}, 0, p, beta);
        for (int outside = 0; outside < arm; ++outside)
            for (int inside = arm; inside < 8; ++inside)
                CHECK(est[static_cast<std::size_t>(outside)] >= est[static_cast<std::size_t>(inside)]);
    }
}

TEST_CASE("estimates stay nonnegative and finite") {
    const auto grid = ThresholdGrid::uniform(6);
    const auto params = LossParams::make(0.15, 40.0, 0.01);
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        LearnerState state(trial % 2 == 0 ? Variant::unlock : Variant::unlock_plus,
                           theorem_schedule(6, 500), 6);
        for (double& g : state.cum_gain) g = rng.u01() * 50.0;
        const auto p = compute_strategy(state);
        const int arm = sample_arm(p, rng);
        const double f = quantize_score(rng.u01());
        const int m = f < grid.value(arm) ? 1 : 0;
        Feedback fb{m, m == 0 ? std::optional<double>(f) : std::nullopt};
        const auto est = learner_step(state, p, arm, fb, grid, params);
        for (double v : est) {
            CHECK(v >= 0.0);
            CHECK(std::isfinite(v));
        }
        for (double g : state.cum_gain) CHECK(std::isfinite(g));
    }
}

TEST_CASE("update accumulates and rejects bad input") {
    LearnerState state(Variant::bandit, {0.1, 0.1, 0.5}, 2);
    apply_estimate(state, {1.0, 2.0});
    CHECK(state.cum_gain[0] == 1.0);
    CHECK(state.cum_gain[1] == 2.0);
    apply_estimate(state, {0.0, 0.0});
    CHECK(state.cum_gain[0] == 1.0);
    CHECK(state.cum_gain[1] == 2.0);
    CHECK_THROWS_AS(apply_estimate(state, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(apply_estimate(state, {1.0, std::nan("")}), std::invalid_argument);

    // Step-by-step accumulation equals a one-shot sum.
    Rng rng(3);
    LearnerState a(Variant::bandit, {0.1, 0.1, 0.5}, 5);
    std::vector<double> total(5, 0.0);
    for (int step = 0; step < 100; ++step) {
        std::vector<double> est(5);
        for (double& v : est) v = rng.u01() * 10.0 - 3.0;
        apply_estimate(a, est);
        for (int i = 0; i < 5; ++i) total[static_cast<std::size_t>(i)] += est[static_cast<std::size_t>(i)];
    }
    LearnerState b(Variant::bandit, {0.1, 0.1, 0.5}, 5);
    apply_estimate(b, total);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(a.cum_gain[static_cast<std::size_t>(i)] - b.cum_gain[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("strategy invariants hold along a run") {
    const auto grid = ThresholdGrid::uniform(10);
    const auto params = LossParams::make(0.1, 40.0, 0.01);
    const auto hyper = theorem_schedule(10, 300);
    LearnerState state(Variant::unlock_plus, hyper, 10);
    Rng rng(77);
    for (int t = 0; t < 300; ++t) {
        const auto p = compute_strategy(state);
        check_valid_strategy(p, hyper.gamma);
        const int arm = sample_arm(p, rng);
        const double f = quantize_score(rng.u01());
        const int m = f < grid.value(arm) ? 1 : 0;
        Feedback fb{m, m == 0 ? std::optional<double>(f) : std::nullopt};
        learner_step(state, p, arm, fb, grid, params);
    }
}

TEST_CASE("hyper validation") {
    CHECK_THROWS_AS(validate_hyper({0.0, 0.1, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate_hyper({0.1, 1.0, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(validate_hyper({0.1, 0.1, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(validate_hyper({0.1, 0.0, 1.0}));
}

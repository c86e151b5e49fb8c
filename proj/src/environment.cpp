#include "ocp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "ocp/replay.hpp"

namespace ocp {

void validate_truth(const StepTruth& truth, int k) {
    if (!(truth.f_star >= 0.0 && truth.f_star <= 1.0))
        throw std::domain_error("StepTruth: f_star outside [0, 1]");
    if (static_cast<int>(truth.set_sizes.size()) != k)
        throw std::invalid_argument("StepTruth: set_sizes length mismatch");
    for (std::size_t i = 0; i < truth.set_sizes.size(); ++i) {
        if (truth.set_sizes[i] < 0) throw std::invalid_argument("StepTruth: negative set size");
        if (i > 0 && truth.set_sizes[i] > truth.set_sizes[i - 1])
            throw std::invalid_argument("StepTruth: set_sizes not nonincreasing");
    }
}

std::vector<long long> count_at_thresholds(const std::vector<double>& scores, const ThresholdGrid& grid) {
    const int k = grid.size();
    // bucket[i] counts scores whose highest covered threshold is pi_i.
    std::vector<long long> bucket(static_cast<std::size_t>(k), 0);
    const auto& pis = grid.values();
    if (grid.is_uniform()) {
        const double km1 = static_cast<double>(k - 1);
        for (double s : scores) {
            int b = static_cast<int>(s * km1);
            if (b > k - 1) b = k - 1;
            if (b < 0) b = 0;
            // Fix up against the stored grid values so the f >= pi rule is
            // applied exactly even when s * (k-1) rounds across a boundary.
            while (b + 1 < k && s >= pis[static_cast<std::size_t>(b + 1)]) ++b;
            while (b > 0 && s < pis[static_cast<std::size_t>(b)]) --b;
            if (s >= pis[static_cast<std::size_t>(b)]) ++bucket[static_cast<std::size_t>(b)];
        }
    } else {
        for (double s : scores) {
            int covered = grid.covered_count(s);
            if (covered > 0) ++bucket[static_cast<std::size_t>(covered - 1)];
        }
    }
    std::vector<long long> sizes(static_cast<std::size_t>(k), 0);
    long long acc = 0;
    for (int i = k - 1; i >= 0; --i) {
        acc += bucket[static_cast<std::size_t>(i)];
        sizes[static_cast<std::size_t>(i)] = acc;
    }
    return sizes;
}

const char* env_kind_name(EnvKind kind) {
    switch (kind) {
        case EnvKind::iid: return "iid";
        case EnvKind::exponent_schedule: return "exponent";
        case EnvKind::covariate_shift: return "shift";
        case EnvKind::adaptive: return "adaptive";
        case EnvKind::replay: return "replay";
    }
    return "?";
}

void EnvSpec::validate(const ThresholdGrid& grid) const {
    switch (kind) {
        case EnvKind::iid:
        case EnvKind::exponent_schedule:
        case EnvKind::adaptive:
            if (label_count < 1) throw std::invalid_argument("env.L: must be >= 1");
            if (!(beta_a > 0.0)) throw std::invalid_argument("env.beta_a: must be > 0");
            if (!(beta_b > 0.0)) throw std::invalid_argument("env.beta_b: must be > 0");
            break;
        default:
            break;
    }
    if (kind == EnvKind::exponent_schedule) {
        if (exponents.empty()) throw std::invalid_argument("env.exponents: must be nonempty");
        for (double e : exponents)
            if (!(e > 0.0)) throw std::invalid_argument("env.exponents: entries must be > 0");
        if (phase_ends.size() + 1 != exponents.size())
            throw std::invalid_argument("env.phase_ends: need one fewer boundary than exponents");
        for (std::size_t i = 0; i < phase_ends.size(); ++i) {
            if (phase_ends[i] < 1) throw std::invalid_argument("env.phase_ends: entries must be >= 1");
            if (i > 0 && phase_ends[i] <= phase_ends[i - 1])
                throw std::invalid_argument("env.phase_ends: must be strictly increasing");
        }
    }
    if (kind == EnvKind::covariate_shift) {
        if (!(shift_fraction > 0.0 && shift_fraction < 1.0))
            throw std::invalid_argument("env.shift_fraction: must lie in (0, 1)");
        if (!(sigma_pre > 0.0)) throw std::invalid_argument("env.sigma_pre: must be > 0");
        if (!(sigma_post > 0.0)) throw std::invalid_argument("env.sigma_post: must be > 0");
        if (bin_count < 2) throw std::invalid_argument("env.bins: must be >= 2");
        if (horizon < 1) throw std::invalid_argument("env: covariate shift needs the horizon");
    }
    if (kind == EnvKind::adaptive) {
        if (window < 1) throw std::invalid_argument("env.window: must be >= 1");
        if (!(margin > 0.0 && margin < grid.min_spacing()))
            throw std::invalid_argument("env.epsilon: must lie in (0, min grid spacing)");
    }
    if (kind == EnvKind::replay && replay_path.empty())
        throw std::invalid_argument("env.path: replay environment needs a file path");
}

namespace {

class IidEnvironment : public Environment {
public:
    IidEnvironment(const EnvSpec& spec, const ThresholdGrid& grid, std::uint64_t seed)
        : grid_(grid), rng_(seed), label_count_(spec.label_count), a_(spec.beta_a), b_(spec.beta_b) {}

    StepTruth step(long long t) override {
        std::vector<double> scores(static_cast<std::size_t>(label_count_));
        for (double& s : scores) s = rng_.beta(a_, b_);
        scores[0] = quantize_score(scores[0]);  // the true label's score
        StepTruth truth;
        truth.t = t;
        truth.f_star = scores[0];
        truth.set_sizes = count_at_thresholds(scores, grid_);
        return truth;
    }

private:
    ThresholdGrid grid_;
    Rng rng_;
    int label_count_;
    double a_, b_;
};

class ExponentScheduleEnvironment : public Environment {
public:
    ExponentScheduleEnvironment(const EnvSpec& spec, const ThresholdGrid& grid, std::uint64_t seed)
        : grid_(grid), rng_(seed), label_count_(spec.label_count), a_(spec.beta_a), b_(spec.beta_b),
          exponents_(spec.exponents), phase_ends_(spec.phase_ends) {}

    StepTruth step(long long t) override {
        const double e = exponent_for(t);
        std::vector<double> scores(static_cast<std::size_t>(label_count_));
        for (double& s : scores) {
            s = rng_.beta(a_, b_);
            if (e != 1.0) s = std::pow(s, e);
        }
        scores[0] = quantize_score(scores[0]);
        StepTruth truth;
        truth.t = t;
        truth.f_star = scores[0];
        truth.set_sizes = count_at_thresholds(scores, grid_);
        return truth;
    }

    double exponent_for(long long t) const {
        std::size_t phase = 0;
        while (phase < phase_ends_.size() && t > phase_ends_[phase]) ++phase;
        return exponents_[phase];
    }

private:
    ThresholdGrid grid_;
    Rng rng_;
    int label_count_;
    double a_, b_;
    std::vector<double> exponents_;
    std::vector<long long> phase_ends_;
};

// Regression analogue: a binned response axis, a per-step prediction, and
// Gaussian residual noise whose scale changes at the shift boundary.
// Conformal sets are intervals around the prediction, integerized by
// counting bins; the true response is snapped to its bin so the recorded
// score is one of the counted scores.
class CovariateShiftEnvironment : public Environment {
public:
    CovariateShiftEnvironment(const EnvSpec& spec, const ThresholdGrid& grid, std::uint64_t seed)
        : grid_(grid), rng_(seed), bins_(spec.bin_count), sigma_pre_(spec.sigma_pre),
          sigma_post_(spec.sigma_post),
          boundary_(static_cast<long long>(spec.shift_fraction * static_cast<double>(spec.horizon) + 1e-9)) {}

    StepTruth step(long long t) override {
        // Draws are phase-independent so that equal pre/post parameters make
        // the stream indistinguishable from a stationary one.
        const double mu = 0.25 + 0.5 * rng_.u01();
        const double noise = rng_.normal();
        const double sigma = t <= boundary_ ? sigma_pre_ : sigma_post_;
        double y = mu + sigma * noise;
        if (y < 0.0) y = 0.0;
        if (y > 1.0) y = 1.0;
        int true_bin = static_cast<int>(y * bins_);
        if (true_bin > bins_ - 1) true_bin = bins_ - 1;

        std::vector<double> scores(static_cast<std::size_t>(bins_));
        for (int j = 0; j < bins_; ++j) {
            const double center = (j + 0.5) / bins_;
            scores[static_cast<std::size_t>(j)] = 1.0 - std::abs(center - mu);
        }
        scores[static_cast<std::size_t>(true_bin)] =
            quantize_score(scores[static_cast<std::size_t>(true_bin)]);

        StepTruth truth;
        truth.t = t;
        truth.f_star = scores[static_cast<std::size_t>(true_bin)];
        truth.set_sizes = count_at_thresholds(scores, grid_);
        return truth;
    }

private:
    ThresholdGrid grid_;
    Rng rng_;
    int bins_;
    double sigma_pre_, sigma_post_;
    long long boundary_;
};

// Threshold tracker: plants the true-label score just below the learner's
// modal recent arm, forcing miscoverage for every arm above it. Falls back
// to uniform draws until it has seen a play.
class AdaptiveEnvironment : public Environment {
public:
    AdaptiveEnvironment(const EnvSpec& spec, const ThresholdGrid& grid, std::uint64_t seed)
        : grid_(grid), rng_(seed), label_count_(spec.label_count), a_(spec.beta_a), b_(spec.beta_b),
          window_(spec.window), margin_(spec.margin) {}

    StepTruth step(long long t) override {
        std::vector<double> scores(static_cast<std::size_t>(label_count_));
        for (double& s : scores) s = rng_.beta(a_, b_);
        if (!recent_.empty()) {
            std::vector<int> counts(static_cast<std::size_t>(grid_.size()), 0);
            for (int arm : recent_) ++counts[static_cast<std::size_t>(arm)];
            int mode = 0;
            for (int i = 1; i < grid_.size(); ++i)
                if (counts[static_cast<std::size_t>(i)] > counts[static_cast<std::size_t>(mode)]) mode = i;
            scores[0] = std::max(0.0, grid_.value(mode) - margin_);
        }
        scores[0] = quantize_score(scores[0]);
        StepTruth truth;
        truth.t = t;
        truth.f_star = scores[0];
        truth.set_sizes = count_at_thresholds(scores, grid_);
        return truth;
    }

    void observe(int arm, double /*pi*/, int /*miscovered*/) override {
        recent_.push_back(arm);
        if (static_cast<int>(recent_.size()) > window_) recent_.pop_front();
    }

private:
    ThresholdGrid grid_;
    Rng rng_;
    int label_count_;
    double a_, b_;
    int window_;
    double margin_;
    std::deque<int> recent_;
};

class ReplayEnvironment : public Environment {
public:
    ReplayEnvironment(const std::string& path, int k) : reader_(path, k) {}

    StepTruth step(long long t) override {
        auto row = reader_.next();
        if (!row) {
            if (t <= 1) throw std::runtime_error("replay: empty stream");
            throw std::runtime_error("replay: stream ended before step " + std::to_string(t));
        }
        return *row;
    }

private:
    ReplayReader reader_;
};

}  // namespace

std::unique_ptr<Environment> make_environment(const EnvSpec& spec, const ThresholdGrid& grid,
                                              std::uint64_t seed) {
    spec.validate(grid);
    switch (spec.kind) {
        case EnvKind::iid: return std::make_unique<IidEnvironment>(spec, grid, seed);
        case EnvKind::exponent_schedule:
            return std::make_unique<ExponentScheduleEnvironment>(spec, grid, seed);
        case EnvKind::covariate_shift:
            return std::make_unique<CovariateShiftEnvironment>(spec, grid, seed);
        case EnvKind::adaptive: return std::make_unique<AdaptiveEnvironment>(spec, grid, seed);
        case EnvKind::replay: return std::make_unique<ReplayEnvironment>(spec.replay_path, grid.size());
    }
    throw std::logic_error("make_environment: unknown kind");
}

}  // namespace ocp

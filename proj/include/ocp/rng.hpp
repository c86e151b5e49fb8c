#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace ocp {

// SplitMix64 mixing step. Used to derive independent stream seeds from a
// base seed in closed form, so suite runs are order-independent.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed of the i-th run in a suite with the given base seed.
inline std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

// Per-run streams: the learner and the environment draw from separate
// generators so replay-mode runs can reproduce live runs exactly.
inline std::uint64_t learner_stream_seed(std::uint64_t seed) { return splitmix64(seed); }
inline std::uint64_t env_stream_seed(std::uint64_t seed) { return splitmix64(seed ^ 0xA5A5A5A5A5A5A5A5ULL); }

// Seeded uniform source. All variates are derived from raw mt19937_64
// output through fixed arithmetic; std::*_distribution is avoided because
// its exact output is not pinned by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on [0, 1).
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the paired variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = u01();
        double u2 = u01();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be > 0");
        if (shape < 1.0) {
            double boost = std::pow(u01_open(), 1.0 / shape);
            return gamma(shape + 1.0) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = u01_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Beta(a, b); uniform when a == b == 1.
    double beta(double a, double b) {
        if (a == 1.0 && b == 1.0) return u01();
        double ga = gamma(a);
        double gb = gamma(b);
        double s = ga + gb;
        return s > 0.0 ? ga / s : 0.5;
    }

private:
    double u01_open() {  // (0, 1)
        double u = u01();
        return u > 0.0 ? u : 0x1.0p-53;
    }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Rounds a score to 9 decimal places. Every synthetic environment emits
// true-label scores in this form so the replay file format (which prints
// 9 fractional digits) is lossless.
inline double quantize_score(double x) {
    double q = static_cast<double>(std::llround(x * 1e9)) / 1e9;
    if (q < 0.0) q = 0.0;
    if (q > 1.0) q = 1.0;
    return q;
}

}  // namespace ocp

#pragma once

namespace ocp {

// Conformal loss parameters. The loss of an arm is a miscoverage term plus
// an inefficiency term; `scale` is the decay factor s(T) applied to the
// inefficiency term so that it vanishes as the horizon grows (s(T) = T^-rho
// by default). Loss bounds are precomputed once and cached so that all gain
// normalization is bit-stable.
struct LossParams {
    double alpha;     // target miscoverage level, in (0, 0.5)
    double c;         // miscoverage/inefficiency trade-off weight, > 0
    double scale;     // decay value s(T), in (0, 1]
    double loss_min;  // attained at pi = 1 covered
    double loss_max;  // attained at pi = 1 miscovered

    static LossParams make(double alpha, double c, double scale);
    static double decay_scale(long long horizon, double rho);

    double span() const { return loss_max - loss_min; }
};

// 1 iff the true label's score falls below the threshold (labels are
// included when f >= pi, so equality covers).
int miscoverage_bit(double f_star, double pi);

// Miscoverage term: alpha-adaptive penalty, larger on miscovered arms.
double miscoverage_term(int m, const LossParams& params);

// Inefficiency term: always negative; rewards small sets among covered arms
// and large sets among miscovered arms.
double inefficiency_term(double pi, int m, const LossParams& params);

double loss_value(double pi, int m, const LossParams& params);

// Affine rescaling of a loss into [0, 1] with 1 at loss_min. Values outside
// [loss_min, loss_max] by more than 1e-12 are a domain error.
double normalized_gain(double loss, const LossParams& params);

// The gain an arm would earn if it had miscovered; stands in for
// unobservable gains below the chosen arm. Identically equal to
// normalized_gain(loss_value(pi, 1, params)).
double pseudo_gain(double pi, const LossParams& params);

}  // namespace ocp

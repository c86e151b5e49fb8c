#include "ocp/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace ocp {

namespace {
constexpr double kGainTolerance = 1e-12;
}

LossParams LossParams::make(double alpha, double c, double scale) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("LossParams: alpha must lie in (0, 0.5)");
    if (!(c > 0.0)) throw std::invalid_argument("LossParams: c must be > 0");
    if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("LossParams: scale must lie in (0, 1]");
    LossParams p{alpha, c, scale, 0.0, 0.0};
    // Extremes are both attained at pi = 1: covered loss decreases in pi,
    // miscovered loss increases in pi.
    p.loss_min = miscoverage_term(0, p) + inefficiency_term(1.0, 0, p);
    p.loss_max = miscoverage_term(1, p) + inefficiency_term(1.0, 1, p);
    if (!(p.loss_min < p.loss_max)) throw std::invalid_argument("LossParams: degenerate loss range");
    return p;
}

double LossParams::decay_scale(long long horizon, double rho) {
    if (horizon < 1) throw std::invalid_argument("decay_scale: horizon must be >= 1");
    if (rho < 0.0) throw std::invalid_argument("decay_scale: rho must be >= 0");
    return std::exp(-rho * std::log(static_cast<double>(horizon)));
}

int miscoverage_bit(double f_star, double pi) {
    if (!(f_star >= 0.0 && f_star <= 1.0)) throw std::domain_error("miscoverage_bit: f_star outside [0, 1]");
    if (!(pi >= 0.0 && pi <= 1.0)) throw std::domain_error("miscoverage_bit: pi outside [0, 1]");
    return f_star < pi ? 1 : 0;
}

double miscoverage_term(int m, const LossParams& params) {
    const double a = params.alpha;
    return m == 0 ? a + a * (1.0 - a) : 1.0 - a * (1.0 - a);
}

double inefficiency_term(double pi, int m, const LossParams& params) {
    const double a = params.alpha;
    const double ca = params.c * a;
    if (m == 0) return -ca * (1.0 + pi * pi / (1.0 - a)) * params.scale;
    return -(ca * params.scale) / (1.0 + a * (1.0 - 2.0 * a) * pi);
}

double loss_value(double pi, int m, const LossParams& params) {
    return miscoverage_term(m, params) + inefficiency_term(pi, m, params);
}

double normalized_gain(double loss, const LossParams& params) {
    if (loss < params.loss_min - kGainTolerance || loss > params.loss_max + kGainTolerance)
        throw std::domain_error("normalized_gain: loss outside [loss_min, loss_max]");
    double g = (params.loss_max - loss) / params.span();
    if (g < 0.0) g = 0.0;
    if (g > 1.0) g = 1.0;
    return g;
}

double pseudo_gain(double pi, const LossParams& params) {
    // The pseudo-loss coincides with the miscovered-arm loss at pi, so this
    // is exactly the gain the arm would earn on miscoverage.
    return normalized_gain(loss_value(pi, 1, params), params);
}

}  // namespace ocp

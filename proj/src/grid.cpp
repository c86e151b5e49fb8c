#include "ocp/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ocp {

ThresholdGrid ThresholdGrid::uniform(int k) {
    if (k < 2) throw std::invalid_argument("ThresholdGrid: K must be >= 2");
    std::vector<double> v(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = static_cast<double>(i) / (k - 1);
    return ThresholdGrid(std::move(v), true);
}

ThresholdGrid::ThresholdGrid(std::vector<double> values) : ThresholdGrid(std::move(values), false) {}

ThresholdGrid::ThresholdGrid(std::vector<double> values, bool uniform)
    : values_(std::move(values)), uniform_(uniform) {
    if (values_.size() < 2) throw std::invalid_argument("ThresholdGrid: K must be >= 2");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double v = values_[i];
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("ThresholdGrid: values must lie in [0, 1]");
        if (i > 0 && !(values_[i - 1] < v))
            throw std::invalid_argument("ThresholdGrid: values must be strictly increasing");
    }
}

double ThresholdGrid::min_spacing() const {
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < values_.size(); ++i) s = std::min(s, values_[i] - values_[i - 1]);
    return s;
}

int ThresholdGrid::covered_count(double f_star) const {
    // First threshold strictly above f_star; everything before it is covered.
    auto it = std::upper_bound(values_.begin(), values_.end(), f_star);
    return static_cast<int>(it - values_.begin());
}

}  // namespace ocp

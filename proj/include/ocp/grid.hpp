#pragma once

#include <vector>

namespace ocp {

// The discretized arm space: K thresholds pi_0 < ... < pi_{K-1} in [0, 1].
// The uniform constructor always includes both endpoints; pi = 0 is the
// comparator arm that covers every label.
class ThresholdGrid {
public:
    // pi_i = i / (k - 1) exactly.
    static ThresholdGrid uniform(int k);

    // Custom ascending thresholds in [0, 1]; mainly for tests.
    explicit ThresholdGrid(std::vector<double> values);

    int size() const { return static_cast<int>(values_.size()); }
    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }
    bool is_uniform() const { return uniform_; }
    double min_spacing() const;

    // Number of arms covered by a score: #{i : f_star >= pi_i}. Coverage is
    // a prefix of the grid since thresholds ascend.
    int covered_count(double f_star) const;

private:
    ThresholdGrid(std::vector<double> values, bool uniform);

    std::vector<double> values_;
    bool uniform_ = false;
};

}  // namespace ocp

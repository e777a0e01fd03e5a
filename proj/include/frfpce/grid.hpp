#ifndef FRFPCE_GRID_HPP
#define FRFPCE_GRID_HPP

#include <Eigen/Core>

namespace frfpce {

/// Discrete angular-frequency axis, strictly increasing, in rad/s.
class FrequencyGrid {
public:
    FrequencyGrid() = default;  // empty; fill via a factory before use

    /// Equidistant grid start..stop (rad/s). The stop value is included only
    /// when it lands on the step lattice; otherwise the grid ends at the last
    /// lattice point below stop.
    static FrequencyGrid from_range(double start, double stop, double step);

    /// Hz convenience wrapper around from_range.
    static FrequencyGrid from_range_hz(double start_hz, double stop_hz, double step_hz);

    /// Arbitrary strictly-increasing values (>= 2 points).
    static FrequencyGrid from_values(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const { return values_; }
    Eigen::Index size() const { return values_.size(); }
    double front() const { return values_(0); }
    double back() const { return values_(values_.size() - 1); }
    bool equidistant() const { return equidistant_; }

    bool operator==(const FrequencyGrid& other) const {
        return values_.size() == other.values_.size() && values_ == other.values_;
    }

private:
    Eigen::VectorXd values_;
    bool equidistant_ = false;
};

}  // namespace frfpce

#endif

#include "frfpce/grid.hpp"

#include <cmath>

#include "frfpce/errors.hpp"

namespace frfpce {

FrequencyGrid FrequencyGrid::from_range(double start, double stop, double step) {
    if (!(step > 0.0)) throw ConfigError("frequency grid: step must be > 0");
    if (!(stop > start)) throw ConfigError("frequency grid: stop must be > start");
    // last lattice point not exceeding stop (tiny slack absorbs roundoff when
    // stop is meant to be on the lattice, e.g. 10..35 Hz step 0.01)
    auto n = static_cast<Eigen::Index>(std::floor((stop - start) / step * (1.0 + 1e-12))) + 1;
    if (n < 2) throw ConfigError("frequency grid: fewer than 2 points in range");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = start + static_cast<double>(i) * step;
    FrequencyGrid g;
    g.values_ = std::move(v);
    g.equidistant_ = true;
    return g;
}

FrequencyGrid FrequencyGrid::from_range_hz(double start_hz, double stop_hz, double step_hz) {
    const double two_pi = 2.0 * M_PI;
    return from_range(start_hz * two_pi, stop_hz * two_pi, step_hz * two_pi);
}

FrequencyGrid FrequencyGrid::from_values(Eigen::VectorXd values) {
    if (values.size() < 2) throw ConfigError("frequency grid: needs at least 2 points");
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (!(values(i) > values(i - 1)))
            throw ConfigError("frequency grid: values must be strictly increasing");
    }
    // flag equidistance when successive differences agree to 1e-12 relative
    bool equi = true;
    const double d0 = values(1) - values(0);
    for (Eigen::Index i = 2; i < values.size() && equi; ++i) {
        if (std::abs((values(i) - values(i - 1)) - d0) > 1e-12 * std::abs(d0)) equi = false;
    }
    FrequencyGrid g;
    g.values_ = std::move(values);
    g.equidistant_ = equi;
    return g;
}

}  // namespace frfpce

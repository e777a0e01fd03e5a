#ifndef FRFPCE_SIGPROC_HPP
#define FRFPCE_SIGPROC_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "frfpce/dynsys.hpp"
#include "frfpce/grid.hpp"

namespace frfpce::sigproc {

/// Per-channel ordered lists of grid endpoints, resonance peaks and
/// inter-peak valleys (rad/s). Peaks are shared across channels, valleys are
/// channel-specific. Row length is n_sf = 2*n_peaks + 1.
struct SelectedFrequencies {
    Eigen::MatrixXd rows;  // n_channels x n_sf, each row strictly increasing
    int n_peaks = 0;

    Eigen::Index n_channels() const { return rows.rows(); }
    Eigen::Index n_sf() const { return rows.cols(); }
};

/// Continuous piecewise-linear strictly increasing frequency map defined by
/// matching knot lists. Between knots, evaluation is the chord through the
/// bracketing knot pair; knots map to knots exactly.
class PiecewiseLinearMap {
public:
    PiecewiseLinearMap(Eigen::VectorXd source_knots, Eigen::VectorXd target_knots);

    double operator()(double w) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& w) const;

    const Eigen::VectorXd& source_knots() const { return source_; }
    const Eigen::VectorXd& target_knots() const { return target_; }

private:
    Eigen::VectorXd source_, target_;
};

/// Supporting data produced by preprocess_ensemble for the surrogate stages.
struct ScaledEnsemble {
    Eigen::MatrixXd f_table;  // N_ED x (n_channels * n_sf), channel-major selected frequencies
    Eigen::MatrixXd g_real;   // N_ED x (n_channels * n_freq), warped trajectories, real part
    Eigen::MatrixXd g_imag;   // same, imaginary part
    SelectedFrequencies reference_selected;
    FrequencyGrid reference_grid;          // common scaled axis (the reference's own axis)
    Eigen::VectorXcd reference_trajectory; // vectorized raw reference FRF
    int reference_index = 0;
    Eigen::Index n_channels = 0;
    int n_peaks = 0;
};

/// Builds the selected-frequency matrix: peaks from |Im(pole)| restricted to
/// the open grid span, one valley per channel between consecutive peaks at
/// the minimum of |H|, refined by a 3-point quadratic fit of log|H|.
/// Throws NumericError when no pole falls in the span or a valley interval
/// holds fewer than 3 grid points.
SelectedFrequencies extract_selected_frequencies(const dynsys::FrfSet& frf,
                                                 const std::vector<std::complex<double>>& poles);

/// Fits the map sending source knots to reference knots exactly.
PiecewiseLinearMap fit_transform(const Eigen::VectorXd& source_row,
                                 const Eigen::VectorXd& reference_row);

/// Swaps source and target knots.
PiecewiseLinearMap invert_map(const PiecewiseLinearMap& map);

/// Re-indexes channel amplitudes to nu = map(omega) and interpolates real and
/// imaginary parts separately (natural cubic splines) onto the reference
/// grid. Throws NumericError when the reference grid leaves the mapped span.
Eigen::VectorXcd warp_frf(const Eigen::VectorXd& source_grid, const Eigen::VectorXcd& channel,
                          const PiecewiseLinearMap& map, const FrequencyGrid& reference_grid);

/// Warps every realization onto the reference scaled axis and assembles the
/// selected-frequency table and the real/imaginary trajectory matrices.
/// Requires a shared grid and a constant selected-frequency count; violations
/// raise NumericError naming the offending realization.
ScaledEnsemble preprocess_ensemble(const std::vector<dynsys::FrfSet>& frfs,
                                   const std::vector<SelectedFrequencies>& selected,
                                   int reference_index);

/// Vectorization layout shared by preprocess_ensemble and the surrogate:
/// entry (channel, frequency) of a trajectory lands at channel * n_freq + l.
inline Eigen::Index vec_index(Eigen::Index channel, Eigen::Index l, Eigen::Index n_freq) {
    return channel * n_freq + l;
}

}  // namespace frfpce::sigproc

#endif

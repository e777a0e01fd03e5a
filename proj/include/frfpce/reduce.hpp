#ifndef FRFPCE_REDUCE_HPP
#define FRFPCE_REDUCE_HPP

#include <Eigen/Core>

#include "json.hpp"

namespace frfpce::reduce {

/// Sample PCA of wide row-major data: mean row, orthonormal components (as
/// columns) and the unnormalized Gram eigenvalues, sorted descending.
struct PcaReduction {
    Eigen::VectorXd mean;        // length N
    Eigen::MatrixXd components;  // N x retained
    Eigen::VectorXd eigenvalues; // retained, descending
    double energy_fraction = 1.0;

    Eigen::Index width() const { return mean.size(); }
    Eigen::Index n_components() const { return components.cols(); }
};

/// Centers the data and eigendecomposes either the small Gram matrix
/// (transpose trick, when the width exceeds the sample count) or the direct
/// covariance. Retains the smallest component count whose eigenvalue sum
/// reaches energy_fraction of the total. Zero-variance data yields a
/// mean-only reduction.
PcaReduction fit_pca(const Eigen::MatrixXd& data, double energy_fraction);

/// Scores of rows against the reduction: (rows - mean) * components.
Eigen::MatrixXd project(const PcaReduction& red, const Eigen::MatrixXd& rows);

/// Rows reconstructed from scores: mean + scores * components^T.
Eigen::MatrixXd reconstruct(const PcaReduction& red, const Eigen::MatrixXd& scores);

void to_json(nlohmann::json& j, const PcaReduction& red);
void from_json(const nlohmann::json& j, PcaReduction& red);

}  // namespace frfpce::reduce

#endif

#ifndef FRFPCE_SURROGATE_HPP
#define FRFPCE_SURROGATE_HPP

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <vector>

#include "frfpce/chaos.hpp"
#include "frfpce/dynsys.hpp"
#include "frfpce/reduce.hpp"
#include "frfpce/sigproc.hpp"
#include "json.hpp"

namespace frfpce::surrogate {

/// One full-model evaluation: the FRF set over the common grid plus the
/// system poles used for selected-frequency extraction.
struct ModelResponse {
    dynsys::FrfSet frf;
    std::vector<std::complex<double>> poles;
};

using FullModelEvaluator = std::function<ModelResponse(const Eigen::VectorXd&)>;

struct SurrogateSettings {
    int reference_index = 0;
    double energy_fraction_real = 0.99;
    double energy_fraction_imag = 0.99;
    chaos::AdaptiveSettings pce;
    int threads = 1;
};

/// Two-stage FRF surrogate: stage one predicts the selected frequencies
/// (shared peaks fitted once), stage two predicts the principal-component
/// scores of the warped trajectories, separately for real and imaginary
/// parts. Prediction reverses the pipeline and interpolates back onto the
/// desired output grid.
class FrfSurrogate {
public:
    sigproc::SelectedFrequencies predict_selected(const Eigen::VectorXd& x) const;
    dynsys::FrfSet predict_frf(const Eigen::VectorXd& x) const;

    Eigen::Index n_inputs() const { return n_inputs_; }
    Eigen::Index n_outputs() const { return n_outputs_; }
    Eigen::Index n_channels() const { return n_outputs_ * n_inputs_; }
    int n_peaks() const { return n_peaks_; }
    Eigen::Index n_sf() const { return 2 * n_peaks_ + 1; }

    /// Scalar stage-one targets, counted per channel row as in the selected-
    /// frequency matrix (shared peaks counted once per channel).
    Eigen::Index stage1_target_count() const { return n_channels() * n_sf(); }
    /// Distinct stage-one models actually stored.
    Eigen::Index stage1_model_count() const {
        return 2 + n_peaks_ + n_channels() * (n_peaks_ - 1);
    }
    Eigen::Index stage2_model_count() const {
        return static_cast<Eigen::Index>(score_models_real_.size() + score_models_imag_.size());
    }
    int max_pce_degree() const;

    const FrequencyGrid& output_grid() const { return output_grid_; }
    const FrequencyGrid& reference_grid() const { return reference_grid_; }
    const sigproc::SelectedFrequencies& reference_selected() const { return reference_selected_; }
    const Eigen::VectorXcd& reference_trajectory() const { return reference_trajectory_; }
    const Eigen::VectorXd& reference_point() const { return reference_point_; }
    const reduce::PcaReduction& pca_real() const { return pca_real_; }
    const reduce::PcaReduction& pca_imag() const { return pca_imag_; }
    const std::vector<chaos::PceModel>& score_models_real() const { return score_models_real_; }
    const std::vector<chaos::PceModel>& score_models_imag() const { return score_models_imag_; }

    nlohmann::json to_json() const;
    static FrfSurrogate from_json(const nlohmann::json& j);

    /// Zeroes all stage-two coefficients (the PCA means stay); the prediction
    /// then degenerates to the unwarped mean trajectory.
    void zero_stage2_fluctuations();

    friend FrfSurrogate build(const Eigen::MatrixXd&, const FullModelEvaluator&,
                              const chaos::InputTransform&, const SurrogateSettings&);

private:
    Eigen::Index n_inputs_ = 0, n_outputs_ = 0;
    int n_peaks_ = 0;
    FrequencyGrid output_grid_;
    FrequencyGrid reference_grid_;
    sigproc::SelectedFrequencies reference_selected_;
    Eigen::VectorXcd reference_trajectory_;
    Eigen::VectorXd reference_point_;
    chaos::InputTransform transform_;
    chaos::PceModel start_model_, end_model_;
    std::vector<chaos::PceModel> peak_models_;
    std::vector<std::vector<chaos::PceModel>> valley_models_;  // [channel][between-peak]
    reduce::PcaReduction pca_real_, pca_imag_;
    std::vector<chaos::PceModel> score_models_real_, score_models_imag_;
};

/// Runs the full preprocessing and both PCE stages over the experimental
/// design (rows of ed_points are physical input points).
FrfSurrogate build(const Eigen::MatrixXd& ed_points, const FullModelEvaluator& evaluate,
                   const chaos::InputTransform& transform, const SurrogateSettings& settings);

}  // namespace frfpce::surrogate

#endif

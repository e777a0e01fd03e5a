#ifndef FRFPCE_BENCH_HPP
#define FRFPCE_BENCH_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "frfpce/chaos.hpp"
#include "frfpce/dynsys.hpp"
#include "frfpce/surrogate.hpp"

namespace frfpce::bench {

/// Independent input marginal given by family, physical mean and coefficient
/// of variation (std/mean).
struct Marginal {
    enum class Kind { gaussian, lognormal, uniform };
    Kind kind = Kind::gaussian;
    double mean = 0.0;
    double cov = 0.0;

    static Marginal gaussian(double mean, double cov) { return {Kind::gaussian, mean, cov}; }
    static Marginal lognormal(double mean, double cov);
    static Marginal uniform(double mean, double cov) { return {Kind::uniform, mean, cov}; }
    /// Uniform on [a, b] expressed through mean/cov.
    static Marginal uniform_bounds(double a, double b);

    double quantile(double u) const;  // inverse CDF
    chaos::InputTransform::Dim transform_dim() const;
};

struct RandomInputSpec {
    std::vector<Marginal> marginals;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(marginals.size()); }
    chaos::InputTransform transform() const;
};

/// Latin hypercube sample: one point per equal-probability stratum and
/// dimension, independently permuted, mapped through the marginal inverse
/// CDFs. Deterministic for a given seed.
Eigen::MatrixXd lhs_sample(const RandomInputSpec& spec, int n, std::uint64_t seed);

double rms(const Eigen::VectorXd& v);
double rms(const Eigen::VectorXcd& v);

/// Relative rms difference in percent: 100 * rms(exact - approx) / rms(exact).
/// Complex vectors use the modulus of the differences.
double rms_error(const Eigen::VectorXd& exact, const Eigen::VectorXd& approx);
double rms_error(const Eigen::VectorXcd& exact, const Eigen::VectorXcd& approx);

/// Complex per-frequency mean plus the std convention sigma = std(Re) +
/// j*std(Im) (population normalization, so a single member has zero std).
struct EnsembleMoments {
    Eigen::MatrixXcd mean;     // n_channels x n_freq
    Eigen::MatrixXcd std_dev;  // same shape
};
EnsembleMoments ensemble_moments(const std::vector<dynsys::FrfSet>& frfs);

/// Streaming accumulator behind ensemble_moments, usable when realizations
/// are produced on the fly.
class MomentAccumulator {
public:
    MomentAccumulator(Eigen::Index n_channels, Eigen::Index n_freq);
    void add(const Eigen::MatrixXcd& channels);
    EnsembleMoments finalize() const;
    long count() const { return count_; }

private:
    Eigen::MatrixXcd sum_;
    Eigen::MatrixXd sum_re2_, sum_im2_;
    long count_ = 0;
};

/// A parameterized mechanical model plus its input distribution and grid:
/// everything needed to run full-model sweeps and surrogate builds.
struct StochasticModel {
    std::string name;
    RandomInputSpec inputs;
    FrequencyGrid grid;
    std::function<dynsys::MechModel(const Eigen::VectorXd&)> instantiate;

    surrogate::ModelResponse evaluate(const Eigen::VectorXd& x) const;
    surrogate::FullModelEvaluator evaluator() const;
};

/// Two-mass chain with one shared random stiffness (gaussian, 5% cov),
/// FRFs on the 10..35 Hz grid with 0.01 Hz step.
StochasticModel make_2dof();

/// Six-mass network with 16 lognormal inputs; damping is
/// damping_scale * diag(mean masses), grid 1..25 rad/s with the given step.
StochasticModel make_6dof(double damping_scale = 0.1, double grid_step = 0.01 * M_PI);

struct ConvergenceRow {
    int n_ed = 0;
    Eigen::VectorXd pce_mean_err, mc_mean_err;  // per channel, percent
    Eigen::VectorXd pce_std_err, mc_std_err;
};

/// For each design size: builds a surrogate, then compares surrogate and
/// plain Monte-Carlo moment estimates against a large full-model reference,
/// all in the Eq.-(22)-style relative rms metric.
std::vector<ConvergenceRow> convergence_study(const StochasticModel& model,
                                              const std::vector<int>& ed_sizes,
                                              int reference_size, std::uint64_t seed,
                                              const surrogate::SurrogateSettings& settings);

struct CaseStudyOptions {
    int ed_size = 40;
    int reference_size = 2000;
    std::uint64_t seed = 1;
    surrogate::SurrogateSettings settings;
    std::filesystem::path out_dir;  // empty = no files written
    std::string tag;                // extra file-name tag, e.g. damping level
};

/// Key validation numbers; per-channel vectors are in channel order.
struct CaseStudyReport {
    Eigen::Index stage1_targets = 0;
    Eigen::Index stage1_models = 0;
    Eigen::Index stage2_models = 0;
    int max_degree = 0;
    Eigen::VectorXd pce_mean_err, mc_mean_err;  // vs reference moments, percent
    Eigen::VectorXd pce_std_err, mc_std_err;
    double median_frf_err = 0.0;  // per-point Eq.-22 errors pooled over channels
    double max_frf_err = 0.0;
    double median_peak_rel_err = 0.0;            // selected-frequency accuracy
    Eigen::VectorXd peak_scatter_slopes;         // per peak, predicted vs true
    double build_seconds = 0.0;
    double validate_seconds = 0.0;
};

/// Validates an existing surrogate against a full-model reference sweep and
/// (when out_dir is set) writes the tabular artifacts: selected-frequency
/// scatter, resonance-amplitude histogram data, FRF envelopes, moment curves,
/// per-FRF error histogram data, worst/typical FRFs and a summary report.
CaseStudyReport validate_surrogate(const StochasticModel& model,
                                   const surrogate::FrfSurrogate& s,
                                   const CaseStudyOptions& options);

/// Builds one surrogate on a fresh design, then runs validate_surrogate.
CaseStudyReport run_case_study(const StochasticModel& model, const CaseStudyOptions& options);

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows);

}  // namespace frfpce::bench

#endif

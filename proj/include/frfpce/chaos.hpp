#ifndef FRFPCE_CHAOS_HPP
#define FRFPCE_CHAOS_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "json.hpp"

namespace frfpce::chaos {

enum class Family { hermite, legendre };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Truncated multi-index set: all tuples with q-norm (sum alpha_i^q)^(1/q)
/// <= max_degree and at most max_rank nonzero entries, in graded
/// lexicographic order starting with the zero tuple.
struct MultiIndexSet {
    int dim = 0;
    int max_degree = 0;
    double q_norm = 1.0;
    int max_rank = 0;
    std::vector<std::vector<int>> indices;

    Eigen::Index size() const { return static_cast<Eigen::Index>(indices.size()); }
};

MultiIndexSet generate_indices(int dim, int max_degree, double q_norm, int max_rank);

/// Orthonormal univariate polynomial value: probabilists' Hermite scaled by
/// 1/sqrt(k!) for standard normal inputs, Legendre scaled by sqrt(2k+1) for
/// uniform inputs on [-1, 1].
double eval_orthonormal(Family family, int degree, double z);

/// Isoprobabilistic map between physical inputs and the standard variables
/// the polynomial families are orthonormal under. Per dimension:
/// z = ((log_input ? ln x : x) - shift) / scale, with z = 0 for degenerate
/// (zero-scale) marginals.
class InputTransform {
public:
    struct Dim {
        Family family = Family::hermite;
        bool log_input = false;
        double shift = 0.0;
        double scale = 1.0;
    };

    InputTransform() = default;
    explicit InputTransform(std::vector<Dim> dims) : dims_(std::move(dims)) {}

    Eigen::Index dim() const { return static_cast<Eigen::Index>(dims_.size()); }
    const std::vector<Dim>& dims() const { return dims_; }
    std::vector<Family> families() const;

    /// Throws NumericError when a log-input coordinate is not positive.
    Eigen::VectorXd to_standard(const Eigen::VectorXd& x) const;
    Eigen::VectorXd to_physical(const Eigen::VectorXd& z) const;

private:
    std::vector<Dim> dims_;
};

/// Row of multivariate basis values at a standard-space point.
Eigen::RowVectorXd evaluate_basis(const MultiIndexSet& set, const std::vector<Family>& families,
                                  const Eigen::VectorXd& z);
Eigen::RowVectorXd evaluate_basis(const std::vector<std::vector<int>>& indices,
                                  const std::vector<Family>& families, const Eigen::VectorXd& z);

/// Design matrix over standard-space sample rows.
Eigen::MatrixXd build_design(const MultiIndexSet& set, const std::vector<Family>& families,
                             const Eigen::MatrixXd& z_rows);

/// Ordinary least squares through QR. Throws NumericError on rank-deficient
/// designs.
Eigen::VectorXd fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

/// OLS fit bundled with the hat-matrix leave-one-out error (relative to the
/// response variance) and its small-sample corrected variant.
struct OlsFit {
    Eigen::VectorXd coefficients;
    double loo = 0.0;
    double corrected_loo = 0.0;
    bool valid = false;
};
OlsFit fit_ols_loo(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

struct LarsSettings {
    /// Abandon the path after this many consecutive steps without improving
    /// the corrected LOO (0 = automatic, -1 = never / full path).
    int patience = 0;
};

/// Scalar polynomial-chaos model: retained indices, coefficients and the
/// input transform, plus fit diagnostics.
struct PceModel {
    std::vector<Family> families;
    std::vector<std::vector<int>> indices;
    Eigen::VectorXd coefficients;
    InputTransform transform;
    double loo_error = 0.0;
    double corrected_loo = 0.0;
    int selected_degree = 0;

    double predict(const Eigen::VectorXd& x) const;
    double predict_standard(const Eigen::VectorXd& z) const;

    /// Constant model shortcut (zero index only).
    static PceModel constant(const InputTransform& transform, double value);
};

/// Hybrid least-angle regression over the candidate set: the LAR forward path
/// fixes the activation order, ordinary least squares is recomputed on each
/// active set, and the step with minimal corrected leave-one-out error wins.
/// z_rows holds the experimental design in standard space.
PceModel fit_lars(const MultiIndexSet& candidates, const InputTransform& transform,
                  const Eigen::MatrixXd& z_rows, const Eigen::VectorXd& y,
                  const LarsSettings& settings = {});

struct AdaptiveSettings {
    int degree_min = 1;
    int degree_max = 8;
    double q_norm = 1.0;
    int max_rank = 0;  // 0 = unlimited (rank = dimension)
    LarsSettings lars;
};

/// Runs fit_lars for every degree in the range and keeps the model with the
/// minimal corrected LOO; ties break toward the lower degree.
PceModel fit_adaptive(const InputTransform& transform, const Eigen::MatrixXd& x_physical,
                      const Eigen::VectorXd& y, const AdaptiveSettings& settings);

void to_json(nlohmann::json& j, const PceModel& m);
void from_json(const nlohmann::json& j, PceModel& m);

}  // namespace frfpce::chaos

#endif

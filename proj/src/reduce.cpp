#include "frfpce/reduce.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "frfpce/errors.hpp"

namespace frfpce::reduce {

namespace {

/// Fixes each component's sign so its largest-magnitude entry is positive;
/// keeps serialized bundles independent of eigen-solver sign choices.
void fix_signs(Eigen::MatrixXd& components) {
    for (Eigen::Index j = 0; j < components.cols(); ++j) {
        Eigen::Index argmax = 0;
        components.col(j).cwiseAbs().maxCoeff(&argmax);
        if (components(argmax, j) < 0.0) components.col(j) = -components.col(j);
    }
}

}  // namespace

PcaReduction fit_pca(const Eigen::MatrixXd& data, double energy_fraction) {
    if (data.rows() < 2) throw ConfigError("pca: needs at least 2 rows");
    if (!(energy_fraction > 0.0 && energy_fraction <= 1.0))
        throw ConfigError("pca: energy fraction must be in (0, 1]");

    const Eigen::Index n = data.rows();
    const Eigen::Index width = data.cols();

    PcaReduction red;
    red.energy_fraction = energy_fraction;
    red.mean = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - red.mean.transpose();

    const double total = centered.squaredNorm();  // trace of the Gram matrix
    if (total <= 0.0) {
        red.components.resize(width, 0);
        red.eigenvalues.resize(0);
        return red;
    }

    Eigen::VectorXd eigvals;       // descending
    Eigen::MatrixXd components;    // width x count, orthonormal
    if (width > n) {
        // transpose trick: eigendecompose the n x n Gram matrix and lift
        const Eigen::MatrixXd gram = centered * centered.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        if (es.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");
        const Eigen::VectorXd lam = es.eigenvalues();  // ascending
        if (lam.minCoeff() < -1e-10 * total)
            throw NumericError("pca: significantly negative eigenvalue");
        const double lmax = lam.maxCoeff();
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            if (lam(i) > 1e-12 * lmax) ++count;
        eigvals.resize(count);
        components.resize(width, count);
        for (Eigen::Index t = 0; t < count; ++t) {
            const Eigen::Index src = lam.size() - 1 - t;  // descending order
            eigvals(t) = lam(src);
            components.col(t) = centered.transpose() * es.eigenvectors().col(src) /
                                std::sqrt(lam(src));
        }
    } else {
        const Eigen::MatrixXd cov = centered.transpose() * centered;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        if (es.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");
        const Eigen::VectorXd lam = es.eigenvalues();
        if (lam.minCoeff() < -1e-10 * total)
            throw NumericError("pca: significantly negative eigenvalue");
        const double lmax = lam.maxCoeff();
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            if (lam(i) > 1e-12 * lmax) ++count;
        eigvals.resize(count);
        components.resize(width, count);
        for (Eigen::Index t = 0; t < count; ++t) {
            const Eigen::Index src = lam.size() - 1 - t;
            eigvals(t) = lam(src);
            components.col(t) = es.eigenvectors().col(src);
        }
    }

    // energy truncation against the full trace, not just the kept part
    Eigen::Index keep = eigvals.size();
    double cum = 0.0;
    for (Eigen::Index i = 0; i < eigvals.size(); ++i) {
        cum += eigvals(i);
        if (cum >= energy_fraction * total) {
            keep = i + 1;
            break;
        }
    }
    red.eigenvalues = eigvals.head(keep);
    red.components = components.leftCols(keep);
    fix_signs(red.components);
    return red;
}

Eigen::MatrixXd project(const PcaReduction& red, const Eigen::MatrixXd& rows) {
    if (rows.cols() != red.width()) throw ConfigError("pca project: row width mismatch");
    return (rows.rowwise() - red.mean.transpose()) * red.components;
}

Eigen::MatrixXd reconstruct(const PcaReduction& red, const Eigen::MatrixXd& scores) {
    if (scores.cols() != red.n_components())
        throw ConfigError("pca reconstruct: score width mismatch");
    return (scores * red.components.transpose()).rowwise() + red.mean.transpose();
}

void to_json(nlohmann::json& j, const PcaReduction& red) {
    std::vector<std::vector<double>> comps;
    comps.reserve(static_cast<std::size_t>(red.components.cols()));
    for (Eigen::Index c = 0; c < red.components.cols(); ++c)
        comps.emplace_back(red.components.col(c).begin(), red.components.col(c).end());
    j = nlohmann::json{
        {"mean", std::vector<double>(red.mean.begin(), red.mean.end())},
        {"components", comps},
        {"eigenvalues", std::vector<double>(red.eigenvalues.begin(), red.eigenvalues.end())},
        {"energy_fraction", red.energy_fraction}};
}

void from_json(const nlohmann::json& j, PcaReduction& red) {
    const auto mean = j.at("mean").get<std::vector<double>>();
    red.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                 static_cast<Eigen::Index>(mean.size()));
    const auto comps = j.at("components").get<std::vector<std::vector<double>>>();
    red.components.resize(red.mean.size(), static_cast<Eigen::Index>(comps.size()));
    for (std::size_t c = 0; c < comps.size(); ++c) {
        if (static_cast<Eigen::Index>(comps[c].size()) != red.mean.size())
            throw ConfigError("pca: component length mismatch in bundle");
        red.components.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(
            comps[c].data(), static_cast<Eigen::Index>(comps[c].size()));
    }
    const auto vals = j.at("eigenvalues").get<std::vector<double>>();
    red.eigenvalues = Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                        static_cast<Eigen::Index>(vals.size()));
    red.energy_fraction = j.at("energy_fraction").get<double>();
}

}  // namespace frfpce::reduce

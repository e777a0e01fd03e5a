#include "frfpce/chaos.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "frfpce/errors.hpp"

namespace frfpce::chaos {

std::string family_name(Family f) {
    return f == Family::hermite ? "hermite" : "legendre";
}

Family family_from_name(const std::string& name) {
    if (name == "hermite") return Family::hermite;
    if (name == "legendre") return Family::legendre;
    throw ConfigError("unknown polynomial family: " + name);
}

namespace {

void enumerate_recursive(int dim, int pos, int degree_left, double qsum, double qbound, double q,
                         int rank_left, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (pos == dim) {
        out.push_back(current);
        return;
    }
    for (int a = 0; a <= degree_left; ++a) {
        if (a > 0 && rank_left == 0) break;
        const double qs = qsum + (a > 0 ? std::pow(static_cast<double>(a), q) : 0.0);
        if (qs > qbound) break;
        current[static_cast<std::size_t>(pos)] = a;
        enumerate_recursive(dim, pos + 1, degree_left - a, qs, qbound, q,
                            rank_left - (a > 0 ? 1 : 0), current, out);
    }
    current[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace

MultiIndexSet generate_indices(int dim, int max_degree, double q_norm, int max_rank) {
    if (dim < 1) throw ConfigError("multi-index set: dimension must be >= 1");
    if (max_degree < 0) throw ConfigError("multi-index set: degree must be >= 0");
    if (!(q_norm > 0.0 && q_norm <= 1.0)) throw ConfigError("multi-index set: q must be in (0,1]");
    if (max_rank < 1) throw ConfigError("multi-index set: rank must be >= 1");

    MultiIndexSet set;
    set.dim = dim;
    set.max_degree = max_degree;
    set.q_norm = q_norm;
    set.max_rank = std::min(max_rank, dim);

    // (sum a_i^q)^(1/q) <= p  <=>  sum a_i^q <= p^q; slack absorbs pow roundoff
    const double qbound = std::pow(static_cast<double>(max_degree), q_norm) * (1.0 + 1e-12) + 1e-12;
    std::vector<int> current(static_cast<std::size_t>(dim), 0);
    std::vector<std::vector<int>> all;
    enumerate_recursive(dim, 0, max_degree, 0.0, qbound, q_norm, set.max_rank, current, all);

    std::sort(all.begin(), all.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
        int ta = 0, tb = 0;
        for (int v : a) ta += v;
        for (int v : b) tb += v;
        if (ta != tb) return ta < tb;
        return a < b;
    });
    set.indices = std::move(all);
    return set;
}

double eval_orthonormal(Family family, int degree, double z) {
    if (degree < 0) throw ConfigError("basis: negative degree");
    // orthonormal three-term recurrences
    double prev = 0.0;
    double cur = 1.0;
    if (family == Family::hermite) {
        for (int k = 0; k < degree; ++k) {
            const double next =
                (z * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
            prev = cur;
            cur = next;
        }
    } else {
        // legendre, orthonormal w.r.t. the uniform density 1/2 on [-1, 1]
        double pprev = 0.0, pcur = 1.0;  // unnormalized P_k
        for (int k = 0; k < degree; ++k) {
            const double pnext = ((2.0 * k + 1.0) * z * pcur - k * pprev) / (k + 1.0);
            pprev = pcur;
            pcur = pnext;
        }
        cur = std::sqrt(2.0 * degree + 1.0) * pcur;
    }
    return cur;
}

std::vector<Family> InputTransform::families() const {
    std::vector<Family> f;
    f.reserve(dims_.size());
    for (const auto& d : dims_) f.push_back(d.family);
    return f;
}

Eigen::VectorXd InputTransform::to_standard(const Eigen::VectorXd& x) const {
    if (x.size() != dim()) throw ConfigError("input transform: dimension mismatch");
    Eigen::VectorXd z(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto& d = dims_[static_cast<std::size_t>(i)];
        double u = x(i);
        if (d.log_input) {
            if (!(u > 0.0))
                throw NumericError("input transform: coordinate " + std::to_string(i) +
                                   " must be positive for a lognormal marginal");
            u = std::log(u);
        }
        z(i) = d.scale == 0.0 ? 0.0 : (u - d.shift) / d.scale;
    }
    return z;
}

Eigen::VectorXd InputTransform::to_physical(const Eigen::VectorXd& z) const {
    if (z.size() != dim()) throw ConfigError("input transform: dimension mismatch");
    Eigen::VectorXd x(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        const auto& d = dims_[static_cast<std::size_t>(i)];
        const double u = d.shift + d.scale * z(i);
        x(i) = d.log_input ? std::exp(u) : u;
    }
    return x;
}

namespace {

/// Univariate values 0..max_degree for one family at one point.
void univariate_table(Family family, int max_degree, double z, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(max_degree) + 1);
    if (family == Family::hermite) {
        double prev = 0.0, cur = 1.0;
        out[0] = 1.0;
        for (int k = 0; k < max_degree; ++k) {
            const double next =
                (z * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(k + 1.0);
            prev = cur;
            cur = next;
            out[static_cast<std::size_t>(k) + 1] = cur;
        }
    } else {
        double pprev = 0.0, pcur = 1.0;
        out[0] = 1.0;
        for (int k = 0; k < max_degree; ++k) {
            const double pnext = ((2.0 * k + 1.0) * z * pcur - k * pprev) / (k + 1.0);
            pprev = pcur;
            pcur = pnext;
            out[static_cast<std::size_t>(k) + 1] = std::sqrt(2.0 * (k + 1) + 1.0) * pcur;
        }
    }
}

}  // namespace

Eigen::RowVectorXd evaluate_basis(const std::vector<std::vector<int>>& indices,
                                  const std::vector<Family>& families, const Eigen::VectorXd& z) {
    if (static_cast<Eigen::Index>(families.size()) != z.size())
        throw ConfigError("basis: dimension mismatch");
    int maxdeg = 0;
    for (const auto& idx : indices)
        for (int a : idx) maxdeg = std::max(maxdeg, a);
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        univariate_table(families[static_cast<std::size_t>(i)], maxdeg, z(i),
                         tables[static_cast<std::size_t>(i)]);
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto& idx = indices[j];
        double v = 1.0;
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (idx[i] != 0) v *= tables[i][static_cast<std::size_t>(idx[i])];
        row(static_cast<Eigen::Index>(j)) = v;
    }
    return row;
}

Eigen::RowVectorXd evaluate_basis(const MultiIndexSet& set, const std::vector<Family>& families,
                                  const Eigen::VectorXd& z) {
    if (z.size() != set.dim) throw ConfigError("basis: dimension mismatch");
    return evaluate_basis(set.indices, families, z);
}

Eigen::MatrixXd build_design(const MultiIndexSet& set, const std::vector<Family>& families,
                             const Eigen::MatrixXd& z_rows) {
    Eigen::MatrixXd design(z_rows.rows(), set.size());
    for (Eigen::Index i = 0; i < z_rows.rows(); ++i)
        design.row(i) = evaluate_basis(set, families, z_rows.row(i).transpose());
    return design;
}

Eigen::VectorXd fit_ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    if (design.rows() != y.size()) throw ConfigError("ols: design/response size mismatch");
    if (design.rows() < design.cols())
        throw ConfigError("ols: fewer samples than regressors; use the sparse path");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < design.cols())
        throw NumericError("ols: rank-deficient design (rank " + std::to_string(qr.rank()) +
                           " of " + std::to_string(design.cols()) + ")");
    return qr.solve(y);
}

OlsFit fit_ols_loo(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    const Eigen::Index n = design.rows();
    const Eigen::Index p = design.cols();
    OlsFit fit;
    if (n <= p) return fit;  // correction factor needs N > P

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p) return fit;
    fit.coefficients = qr.solve(y);

    const Eigen::MatrixXd q_thin =
        qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    const Eigen::VectorXd residual = y - design * fit.coefficients;

    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    if (var <= 0.0) {
        fit.loo = 0.0;
        fit.corrected_loo = 0.0;
        fit.valid = true;
        return fit;
    }

    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = q_thin.row(i).squaredNorm();
        const double denom = 1.0 - h;
        if (denom < 1e-12) return fit;  // interpolating point, LOO undefined
        const double e = residual(i) / denom;
        acc += e * e;
    }
    fit.loo = acc / static_cast<double>(n) / var;

    // small-sample correction: T = (1 + tr(Cemp^-1)/N) / (1 - P/N),
    // Cemp = Psi^T Psi / N
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const double trace_inv = static_cast<double>(n) * rinv.squaredNorm();
    const double t = (1.0 + trace_inv / static_cast<double>(n)) /
                     (1.0 - static_cast<double>(p) / static_cast<double>(n));
    fit.corrected_loo = fit.loo * t;
    fit.valid = true;
    return fit;
}

double PceModel::predict_standard(const Eigen::VectorXd& z) const {
    const Eigen::RowVectorXd row = evaluate_basis(indices, families, z);
    return row.dot(coefficients.transpose());
}

double PceModel::predict(const Eigen::VectorXd& x) const {
    return predict_standard(transform.to_standard(x));
}

PceModel PceModel::constant(const InputTransform& transform, double value) {
    PceModel m;
    m.families = transform.families();
    m.indices = {std::vector<int>(static_cast<std::size_t>(transform.dim()), 0)};
    m.coefficients.resize(1);
    m.coefficients(0) = value;
    m.transform = transform;
    m.loo_error = 0.0;
    m.corrected_loo = 0.0;
    m.selected_degree = 0;
    return m;
}

PceModel fit_lars(const MultiIndexSet& candidates, const InputTransform& transform,
                  const Eigen::MatrixXd& z_rows, const Eigen::VectorXd& y,
                  const LarsSettings& settings) {
    const Eigen::Index n = z_rows.rows();
    if (n < 3) throw ConfigError("lars: needs at least 3 design points");
    if (y.size() != n) throw ConfigError("lars: design/response size mismatch");

    const std::vector<Family> families = transform.families();
    const double ybar = y.mean();
    const double ystd = std::sqrt((y.array() - ybar).square().mean());
    if (ystd <= 1e-14 * (std::abs(ybar) + 1.0)) {
        PceModel m = PceModel::constant(transform, ybar);
        m.selected_degree = 0;
        return m;
    }

    const Eigen::MatrixXd design = build_design(candidates, families, z_rows);

    // usable non-constant candidate columns
    std::vector<Eigen::Index> usable;
    Eigen::Index const_col = -1;
    for (Eigen::Index j = 0; j < design.cols(); ++j) {
        const auto& idx = candidates.indices[static_cast<std::size_t>(j)];
        const bool is_zero_index =
            std::all_of(idx.begin(), idx.end(), [](int a) { return a == 0; });
        if (is_zero_index) {
            const_col = j;
            continue;
        }
        const double mu = design.col(j).mean();
        const double norm = std::sqrt((design.col(j).array() - mu).square().sum());
        if (norm > 1e-10 * std::sqrt(static_cast<double>(n))) usable.push_back(j);
    }
    if (const_col < 0) throw ConfigError("lars: candidate set must contain the zero index");
    if (usable.size() < 1)
        throw NumericError("lars: fewer than 2 usable regressors (degenerate candidate set)");

    const auto p0 = static_cast<Eigen::Index>(usable.size());
    Eigen::MatrixXd x_norm(n, p0);  // centered, unit-norm copies for the path
    for (Eigen::Index jj = 0; jj < p0; ++jj) {
        Eigen::VectorXd col = design.col(usable[static_cast<std::size_t>(jj)]);
        col.array() -= col.mean();
        x_norm.col(jj) = col / col.norm();
    }
    Eigen::VectorXd y_c = (y.array() - ybar) / ystd;

    // evaluates the hybrid OLS model on an active set (original columns)
    auto hybrid = [&](const std::vector<Eigen::Index>& active) -> OlsFit {
        Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(active.size()) + 1);
        sub.col(0) = design.col(const_col);
        for (std::size_t t = 0; t < active.size(); ++t)
            sub.col(static_cast<Eigen::Index>(t) + 1) = design.col(active[t]);
        return fit_ols_loo(sub, y);
    };

    // candidate models: intercept-only, then one per LAR step
    struct Step {
        std::vector<Eigen::Index> active;
        OlsFit fit;
    };
    std::vector<Step> steps;
    {
        Step s0;
        s0.fit = hybrid({});
        steps.push_back(std::move(s0));
    }

    const Eigen::Index max_active = std::min<Eigen::Index>(p0, n - 2);
    int patience = settings.patience;
    if (patience == 0)
        patience = std::max<int>(20, std::min<int>(100, static_cast<int>(p0 / 10)));

    std::vector<bool> in_active(static_cast<std::size_t>(p0), false);
    std::vector<Eigen::Index> active_local;   // indices into x_norm
    std::vector<Eigen::Index> active_global;  // indices into design
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);

    double best_loo = steps[0].fit.valid ? steps[0].fit.corrected_loo
                                         : std::numeric_limits<double>::infinity();
    int since_best = 0;

    while (static_cast<Eigen::Index>(active_local.size()) < max_active) {
        const Eigen::VectorXd corr = x_norm.transpose() * (y_c - mu);

        // next regressor: max |correlation| among the inactive
        Eigen::Index pick = -1;
        double cmax = -1.0;
        for (Eigen::Index j = 0; j < p0; ++j) {
            if (in_active[static_cast<std::size_t>(j)]) continue;
            const double a = std::abs(corr(j));
            if (a > cmax) {
                cmax = a;
                pick = j;
            }
        }
        if (pick < 0 || !(cmax > 1e-14)) break;  // nothing correlated left

        in_active[static_cast<std::size_t>(pick)] = true;
        active_local.push_back(pick);
        active_global.push_back(usable[static_cast<std::size_t>(pick)]);
        const auto k = static_cast<Eigen::Index>(active_local.size());

        // equiangular direction over the signed active columns
        Eigen::MatrixXd xa(n, k);
        for (Eigen::Index t = 0; t < k; ++t) {
            const Eigen::Index j = active_local[static_cast<std::size_t>(t)];
            const double s = corr(j) >= 0.0 ? 1.0 : -1.0;
            xa.col(t) = s * x_norm.col(j);
        }
        const Eigen::MatrixXd gram = xa.transpose() * xa;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        if (ldlt.info() != Eigen::Success) break;
        const Eigen::VectorXd w = ldlt.solve(Eigen::VectorXd::Ones(k));
        const double denom = w.sum();
        if (!(denom > 0.0)) break;  // numerically dependent active set
        const double aa = 1.0 / std::sqrt(denom);
        const Eigen::VectorXd u = xa * (aa * w);

        double gamma;
        if (k == max_active || k == p0) {
            gamma = cmax / aa;
        } else {
            const Eigen::VectorXd a_all = x_norm.transpose() * u;
            gamma = cmax / aa;  // fallback: full step
            for (Eigen::Index j = 0; j < p0; ++j) {
                if (in_active[static_cast<std::size_t>(j)]) continue;
                const double cj = corr(j), aj = a_all(j);
                const double g1 = (cmax - cj) / (aa - aj);
                const double g2 = (cmax + cj) / (aa + aj);
                if (g1 > 1e-14 && g1 < gamma) gamma = g1;
                if (g2 > 1e-14 && g2 < gamma) gamma = g2;
            }
        }
        mu += gamma * u;

        Step st;
        st.active = active_global;
        st.fit = hybrid(active_global);
        const bool improved =
            st.fit.valid && st.fit.corrected_loo < best_loo - 1e-15;
        if (improved) {
            best_loo = st.fit.corrected_loo;
            since_best = 0;
        } else {
            ++since_best;
        }
        steps.push_back(std::move(st));
        if (patience >= 0 && since_best > patience) break;
    }

    // pick the step with minimal corrected LOO (earliest on ties)
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < steps.size(); ++t) {
        if (!steps[t].fit.valid) continue;
        if (steps[t].fit.corrected_loo < best_val) {
            best_val = steps[t].fit.corrected_loo;
            best = t;
        }
    }
    if (!steps[best].fit.valid) throw NumericError("lars: no valid model along the path");

    const Step& win = steps[best];
    PceModel model;
    model.families = families;
    model.transform = transform;
    model.loo_error = win.fit.loo;
    model.corrected_loo = win.fit.corrected_loo;

    // retained indices in candidate order: zero index first, then active set
    std::vector<Eigen::Index> cols = win.active;
    std::sort(cols.begin(), cols.end());
    model.indices.push_back(candidates.indices[static_cast<std::size_t>(const_col)]);
    model.coefficients.resize(static_cast<Eigen::Index>(cols.size()) + 1);
    model.coefficients(0) = win.fit.coefficients(0);
    for (std::size_t t = 0; t < cols.size(); ++t) {
        model.indices.push_back(candidates.indices[static_cast<std::size_t>(cols[t])]);
        // coefficients in 'win.fit' follow the activation order
        const auto pos = std::find(win.active.begin(), win.active.end(), cols[t]);
        const auto off = static_cast<Eigen::Index>(pos - win.active.begin());
        model.coefficients(static_cast<Eigen::Index>(t) + 1) = win.fit.coefficients(off + 1);
    }
    int deg = 0;
    for (const auto& idx : model.indices) {
        int total = 0;
        for (int a : idx) total += a;
        deg = std::max(deg, total);
    }
    model.selected_degree = deg;
    return model;
}

PceModel fit_adaptive(const InputTransform& transform, const Eigen::MatrixXd& x_physical,
                      const Eigen::VectorXd& y, const AdaptiveSettings& settings) {
    if (settings.degree_min > settings.degree_max)
        throw ConfigError("adaptive fit: empty degree range");
    const auto m = static_cast<int>(transform.dim());
    const int rank = settings.max_rank <= 0 ? m : settings.max_rank;

    Eigen::MatrixXd z(x_physical.rows(), x_physical.cols());
    for (Eigen::Index i = 0; i < x_physical.rows(); ++i)
        z.row(i) = transform.to_standard(x_physical.row(i).transpose()).transpose();

    // constant responses short-circuit the degree sweep
    const double ybar = y.mean();
    const double ystd = std::sqrt((y.array() - ybar).square().mean());
    if (ystd <= 1e-14 * (std::abs(ybar) + 1.0)) return PceModel::constant(transform, ybar);

    PceModel best;
    bool have = false;
    for (int p = settings.degree_min; p <= settings.degree_max; ++p) {
        if (p == 0) continue;  // constant-only set carries no regressors
        const MultiIndexSet candidates = generate_indices(m, p, settings.q_norm, rank);
        PceModel model = fit_lars(candidates, transform, z, y, settings.lars);
        if (!have || model.corrected_loo < best.corrected_loo) {
            best = std::move(model);
            have = true;
        }
    }
    if (!have) throw NumericError("adaptive fit: no degree produced a valid model");
    return best;
}

void to_json(nlohmann::json& j, const PceModel& m) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& d : m.transform.dims()) {
        dims.push_back({{"family", family_name(d.family)},
                        {"log_input", d.log_input},
                        {"shift", d.shift},
                        {"scale", d.scale}});
    }
    nlohmann::json fam = nlohmann::json::array();
    for (Family f : m.families) fam.push_back(family_name(f));
    j = nlohmann::json{{"families", fam},
                       {"indices", m.indices},
                       {"coefficients", std::vector<double>(m.coefficients.begin(),
                                                            m.coefficients.end())},
                       {"transform", dims},
                       {"loo_error", m.loo_error},
                       {"corrected_loo", m.corrected_loo},
                       {"selected_degree", m.selected_degree}};
}

void from_json(const nlohmann::json& j, PceModel& m) {
    m.families.clear();
    for (const auto& f : j.at("families")) m.families.push_back(family_from_name(f));
    m.indices = j.at("indices").get<std::vector<std::vector<int>>>();
    const auto coeffs = j.at("coefficients").get<std::vector<double>>();
    m.coefficients = Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                       static_cast<Eigen::Index>(coeffs.size()));
    std::vector<InputTransform::Dim> dims;
    for (const auto& d : j.at("transform")) {
        InputTransform::Dim dim;
        dim.family = family_from_name(d.at("family"));
        dim.log_input = d.at("log_input").get<bool>();
        dim.shift = d.at("shift").get<double>();
        dim.scale = d.at("scale").get<double>();
        dims.push_back(dim);
    }
    m.transform = InputTransform(std::move(dims));
    m.loo_error = j.at("loo_error").get<double>();
    m.corrected_loo = j.at("corrected_loo").get<double>();
    m.selected_degree = j.at("selected_degree").get<int>();
}

}  // namespace frfpce::chaos

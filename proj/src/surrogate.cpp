#include "frfpce/surrogate.hpp"

#include <algorithm>
#include <string>

#include "frfpce/errors.hpp"
#include "frfpce/parallel.hpp"

namespace frfpce::surrogate {

namespace {

nlohmann::json grid_to_json(const FrequencyGrid& g) {
    return nlohmann::json{
        {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

FrequencyGrid grid_from_json(const nlohmann::json& j) {
    const auto v = j.at("values").get<std::vector<double>>();
    return FrequencyGrid::from_values(
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.emplace_back(m.row(i).begin(), m.row(i).end());
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw ConfigError("bundle: ragged matrix");
        m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(
            rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    }
    return m;
}

}  // namespace

sigproc::SelectedFrequencies FrfSurrogate::predict_selected(const Eigen::VectorXd& x) const {
    const Eigen::Index nch = n_channels();
    const Eigen::Index nsf = n_sf();
    sigproc::SelectedFrequencies sel;
    sel.n_peaks = n_peaks_;
    sel.rows.resize(nch, nsf);

    const double start = start_model_.predict(x);
    const double end = end_model_.predict(x);
    Eigen::VectorXd peaks(n_peaks_);
    for (int i = 0; i < n_peaks_; ++i)
        peaks(i) = peak_models_[static_cast<std::size_t>(i)].predict(x);

    for (Eigen::Index c = 0; c < nch; ++c) {
        sel.rows(c, 0) = start;
        sel.rows(c, nsf - 1) = end;
        for (int i = 0; i < n_peaks_; ++i) sel.rows(c, 2 * i + 1) = peaks(i);
        for (int i = 0; i + 1 < n_peaks_; ++i)
            sel.rows(c, 2 * i + 2) =
                valley_models_[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)].predict(x);
        for (Eigen::Index j = 1; j < nsf; ++j) {
            if (!(sel.rows(c, j) > sel.rows(c, j - 1)))
                throw NumericError(
                    "surrogate: predicted selected frequencies not strictly increasing on "
                    "channel " +
                    std::to_string(c) + " (input outside the trusted region)");
        }
    }
    return sel;
}

dynsys::FrfSet FrfSurrogate::predict_frf(const Eigen::VectorXd& x) const {
    const Eigen::Index nch = n_channels();
    const Eigen::Index nw = reference_grid_.size();

    Eigen::MatrixXd scores_r(1, static_cast<Eigen::Index>(score_models_real_.size()));
    for (std::size_t j = 0; j < score_models_real_.size(); ++j)
        scores_r(0, static_cast<Eigen::Index>(j)) = score_models_real_[j].predict(x);
    Eigen::MatrixXd scores_i(1, static_cast<Eigen::Index>(score_models_imag_.size()));
    for (std::size_t j = 0; j < score_models_imag_.size(); ++j)
        scores_i(0, static_cast<Eigen::Index>(j)) = score_models_imag_[j].predict(x);

    const Eigen::MatrixXd row_r = reduce::reconstruct(pca_real_, scores_r);
    const Eigen::MatrixXd row_i = reduce::reconstruct(pca_imag_, scores_i);

    const sigproc::SelectedFrequencies sel = predict_selected(x);

    dynsys::FrfSet out;
    out.grid = output_grid_;
    out.n_inputs = n_inputs_;
    out.n_outputs = n_outputs_;
    out.channels.resize(nch, output_grid_.size());

    for (Eigen::Index c = 0; c < nch; ++c) {
        Eigen::VectorXcd scaled(nw);
        for (Eigen::Index l = 0; l < nw; ++l) {
            const Eigen::Index v = sigproc::vec_index(c, l, nw);
            scaled(l) = std::complex<double>(row_r(0, v), row_i(0, v));
        }
        const sigproc::PiecewiseLinearMap to_scaled = sigproc::fit_transform(
            sel.rows.row(c).transpose(), reference_selected_.rows.row(c).transpose());
        const sigproc::PiecewiseLinearMap from_scaled = sigproc::invert_map(to_scaled);
        out.channels.row(c) =
            sigproc::warp_frf(reference_grid_.values(), scaled, from_scaled, output_grid_)
                .transpose();
    }
    if (!out.channels.allFinite())
        throw NumericError("surrogate: non-finite prediction");
    return out;
}

int FrfSurrogate::max_pce_degree() const {
    int deg = 0;
    auto visit = [&deg](const chaos::PceModel& m) { deg = std::max(deg, m.selected_degree); };
    visit(start_model_);
    visit(end_model_);
    for (const auto& m : peak_models_) visit(m);
    for (const auto& ch : valley_models_)
        for (const auto& m : ch) visit(m);
    for (const auto& m : score_models_real_) visit(m);
    for (const auto& m : score_models_imag_) visit(m);
    return deg;
}

void FrfSurrogate::zero_stage2_fluctuations() {
    for (auto& m : score_models_real_) m.coefficients.setZero();
    for (auto& m : score_models_imag_) m.coefficients.setZero();
}

FrfSurrogate build(const Eigen::MatrixXd& ed_points, const FullModelEvaluator& evaluate,
                   const chaos::InputTransform& transform, const SurrogateSettings& settings) {
    const Eigen::Index n = ed_points.rows();
    if (n < 3)
        throw ConfigError("surrogate build: insufficient design (need at least 3 points, got " +
                          std::to_string(n) + ")");
    if (ed_points.cols() != transform.dim())
        throw ConfigError("surrogate build: design dimension does not match the input transform");
    if (settings.reference_index < 0 || settings.reference_index >= n)
        throw ConfigError("surrogate build: reference index out of range");

    // full-model sweep over the design, order-independent storage
    std::vector<ModelResponse> responses(static_cast<std::size_t>(n));
    parallel_for(static_cast<int>(n), settings.threads, [&](int k) {
        responses[static_cast<std::size_t>(k)] =
            evaluate(ed_points.row(k).transpose());
    });

    std::vector<dynsys::FrfSet> frfs;
    std::vector<sigproc::SelectedFrequencies> selected;
    frfs.reserve(responses.size());
    selected.reserve(responses.size());
    for (std::size_t k = 0; k < responses.size(); ++k) {
        try {
            selected.push_back(
                sigproc::extract_selected_frequencies(responses[k].frf, responses[k].poles));
        } catch (const NumericError& e) {
            throw NumericError("surrogate build: realization " + std::to_string(k) + ": " +
                               e.what());
        }
        frfs.push_back(std::move(responses[k].frf));
    }

    const sigproc::ScaledEnsemble ens =
        sigproc::preprocess_ensemble(frfs, selected, settings.reference_index);
    const Eigen::Index nch = ens.n_channels;
    const Eigen::Index nsf = ens.reference_selected.n_sf();
    const int np = ens.n_peaks;

    FrfSurrogate s;
    s.n_inputs_ = frfs[0].n_inputs;
    s.n_outputs_ = frfs[0].n_outputs;
    s.n_peaks_ = np;
    s.output_grid_ = frfs[0].grid;
    s.reference_grid_ = ens.reference_grid;
    s.reference_selected_ = ens.reference_selected;
    s.reference_trajectory_ = ens.reference_trajectory;
    s.reference_point_ = ed_points.row(settings.reference_index).transpose();
    s.transform_ = transform;

    // PCA per block; tiny job, no point threading the pair
    s.pca_real_ = reduce::fit_pca(ens.g_real, settings.energy_fraction_real);
    s.pca_imag_ = reduce::fit_pca(ens.g_imag, settings.energy_fraction_imag);
    const Eigen::MatrixXd scores_r = reduce::project(s.pca_real_, ens.g_real);
    const Eigen::MatrixXd scores_i = reduce::project(s.pca_imag_, ens.g_imag);

    // every scalar fit as one job: stage-1 distinct targets + stage-2 scores
    struct Job {
        std::string label;
        Eigen::VectorXd y;
        chaos::PceModel* slot;
    };
    std::vector<Job> jobs;

    s.peak_models_.resize(static_cast<std::size_t>(np));
    s.valley_models_.assign(static_cast<std::size_t>(nch),
                            std::vector<chaos::PceModel>(static_cast<std::size_t>(np - 1)));
    s.score_models_real_.resize(static_cast<std::size_t>(s.pca_real_.n_components()));
    s.score_models_imag_.resize(static_cast<std::size_t>(s.pca_imag_.n_components()));

    jobs.push_back({"selected frequency (grid start)", ens.f_table.col(0), &s.start_model_});
    jobs.push_back(
        {"selected frequency (grid end)", ens.f_table.col(nsf - 1), &s.end_model_});
    for (int i = 0; i < np; ++i) {
        // peaks are shared across channels; fit once from channel 0
        jobs.push_back({"selected frequency (peak " + std::to_string(i + 1) + ")",
                        ens.f_table.col(2 * i + 1),
                        &s.peak_models_[static_cast<std::size_t>(i)]});
    }
    for (Eigen::Index c = 0; c < nch; ++c)
        for (int i = 0; i + 1 < np; ++i)
            jobs.push_back({"selected frequency (valley " + std::to_string(i + 1) +
                                ", channel " + std::to_string(c) + ")",
                            ens.f_table.col(c * nsf + 2 * i + 2),
                            &s.valley_models_[static_cast<std::size_t>(c)]
                                             [static_cast<std::size_t>(i)]});
    for (Eigen::Index j = 0; j < scores_r.cols(); ++j)
        jobs.push_back({"real component " + std::to_string(j + 1), scores_r.col(j),
                        &s.score_models_real_[static_cast<std::size_t>(j)]});
    for (Eigen::Index j = 0; j < scores_i.cols(); ++j)
        jobs.push_back({"imaginary component " + std::to_string(j + 1), scores_i.col(j),
                        &s.score_models_imag_[static_cast<std::size_t>(j)]});

    parallel_for(static_cast<int>(jobs.size()), settings.threads, [&](int t) {
        auto& job = jobs[static_cast<std::size_t>(t)];
        try {
            *job.slot = chaos::fit_adaptive(transform, ed_points, job.y, settings.pce);
        } catch (const std::exception& e) {
            throw NumericError("surrogate build: fit failed for " + job.label + ": " + e.what());
        }
    });
    return s;
}

nlohmann::json FrfSurrogate::to_json() const {
    nlohmann::json peak_arr = nlohmann::json::array();
    for (const auto& m : peak_models_) peak_arr.push_back(m);
    nlohmann::json valley_arr = nlohmann::json::array();
    for (const auto& ch : valley_models_) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& m : ch) row.push_back(m);
        valley_arr.push_back(std::move(row));
    }
    nlohmann::json score_r = nlohmann::json::array();
    for (const auto& m : score_models_real_) score_r.push_back(m);
    nlohmann::json score_i = nlohmann::json::array();
    for (const auto& m : score_models_imag_) score_i.push_back(m);

    return nlohmann::json{
        {"schema", "frfpce-surrogate/1"},
        {"n_inputs", n_inputs_},
        {"n_outputs", n_outputs_},
        {"n_peaks", n_peaks_},
        {"output_grid", grid_to_json(output_grid_)},
        {"reference_grid", grid_to_json(reference_grid_)},
        {"reference_selected", matrix_to_json(reference_selected_.rows)},
        {"reference_trajectory_real",
         std::vector<double>(reference_trajectory_.real().begin(),
                             reference_trajectory_.real().end())},
        {"reference_trajectory_imag",
         std::vector<double>(reference_trajectory_.imag().begin(),
                             reference_trajectory_.imag().end())},
        {"reference_point",
         std::vector<double>(reference_point_.begin(), reference_point_.end())},
        {"start_model", start_model_},
        {"end_model", end_model_},
        {"peak_models", peak_arr},
        {"valley_models", valley_arr},
        {"pca_real", pca_real_},
        {"pca_imag", pca_imag_},
        {"score_models_real", score_r},
        {"score_models_imag", score_i}};
}

FrfSurrogate FrfSurrogate::from_json(const nlohmann::json& j) {
    if (j.at("schema").get<std::string>() != "frfpce-surrogate/1")
        throw ConfigError("bundle: unsupported schema " + j.at("schema").get<std::string>());
    FrfSurrogate s;
    s.n_inputs_ = j.at("n_inputs").get<Eigen::Index>();
    s.n_outputs_ = j.at("n_outputs").get<Eigen::Index>();
    s.n_peaks_ = j.at("n_peaks").get<int>();
    s.output_grid_ = grid_from_json(j.at("output_grid"));
    s.reference_grid_ = grid_from_json(j.at("reference_grid"));
    s.reference_selected_.rows = matrix_from_json(j.at("reference_selected"));
    s.reference_selected_.n_peaks = s.n_peaks_;
    const auto tr = j.at("reference_trajectory_real").get<std::vector<double>>();
    const auto ti = j.at("reference_trajectory_imag").get<std::vector<double>>();
    if (tr.size() != ti.size()) throw ConfigError("bundle: trajectory length mismatch");
    s.reference_trajectory_.resize(static_cast<Eigen::Index>(tr.size()));
    for (std::size_t i = 0; i < tr.size(); ++i)
        s.reference_trajectory_(static_cast<Eigen::Index>(i)) =
            std::complex<double>(tr[i], ti[i]);
    const auto rp = j.at("reference_point").get<std::vector<double>>();
    s.reference_point_ = Eigen::Map<const Eigen::VectorXd>(
        rp.data(), static_cast<Eigen::Index>(rp.size()));
    s.start_model_ = j.at("start_model").get<chaos::PceModel>();
    s.end_model_ = j.at("end_model").get<chaos::PceModel>();
    for (const auto& m : j.at("peak_models"))
        s.peak_models_.push_back(m.get<chaos::PceModel>());
    for (const auto& row : j.at("valley_models")) {
        std::vector<chaos::PceModel> ch;
        for (const auto& m : row) ch.push_back(m.get<chaos::PceModel>());
        s.valley_models_.push_back(std::move(ch));
    }
    s.pca_real_ = j.at("pca_real").get<reduce::PcaReduction>();
    s.pca_imag_ = j.at("pca_imag").get<reduce::PcaReduction>();
    for (const auto& m : j.at("score_models_real"))
        s.score_models_real_.push_back(m.get<chaos::PceModel>());
    for (const auto& m : j.at("score_models_imag"))
        s.score_models_imag_.push_back(m.get<chaos::PceModel>());
    s.transform_ = s.start_model_.transform;
    return s;
}

}  // namespace frfpce::surrogate

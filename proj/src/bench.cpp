#include "frfpce/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "frfpce/errors.hpp"
#include "frfpce/io.hpp"
#include "frfpce/parallel.hpp"
#include "frfpce/rng.hpp"
#include "frfpce/sigproc.hpp"

namespace frfpce::bench {

Marginal Marginal::lognormal(double mean, double cov) {
    if (!(mean > 0.0)) throw ConfigError("lognormal marginal requires mean > 0");
    return {Kind::lognormal, mean, cov};
}

Marginal Marginal::uniform_bounds(double a, double b) {
    if (!(b > a)) throw ConfigError("uniform marginal requires b > a");
    const double mean = 0.5 * (a + b);
    const double sd = (b - a) / std::sqrt(12.0);
    const double cov = mean == 0.0 ? 0.0 : sd / std::abs(mean);
    Marginal m{Kind::uniform, mean, cov};
    if (mean == 0.0) {
        // zero-mean uniform cannot carry width through cov; expand via a shifted spec
        throw ConfigError("uniform marginal with zero mean is not representable via cov");
    }
    return m;
}

double Marginal::quantile(double u) const {
    const double sd = cov * std::abs(mean);
    switch (kind) {
        case Kind::gaussian:
            return mean + sd * rng::normal_quantile(u);
        case Kind::lognormal: {
            if (cov == 0.0) return mean;
            const double s2 = std::log(1.0 + cov * cov);
            const double mu = std::log(mean) - 0.5 * s2;
            return std::exp(mu + std::sqrt(s2) * rng::normal_quantile(u));
        }
        case Kind::uniform: {
            const double halfwidth = std::sqrt(3.0) * sd;
            return mean + halfwidth * (2.0 * u - 1.0);
        }
    }
    throw ConfigError("unknown marginal kind");
}

chaos::InputTransform::Dim Marginal::transform_dim() const {
    chaos::InputTransform::Dim d;
    switch (kind) {
        case Kind::gaussian:
            d.family = chaos::Family::hermite;
            d.log_input = false;
            d.shift = mean;
            d.scale = cov * std::abs(mean);
            break;
        case Kind::lognormal: {
            // standardize ln X to unit normal so the Hermite basis stays orthonormal
            d.family = chaos::Family::hermite;
            d.log_input = true;
            const double s2 = std::log(1.0 + cov * cov);
            d.shift = std::log(mean) - 0.5 * s2;
            d.scale = std::sqrt(s2);
            break;
        }
        case Kind::uniform:
            d.family = chaos::Family::legendre;
            d.log_input = false;
            d.shift = mean;
            d.scale = std::sqrt(3.0) * cov * std::abs(mean);
            break;
    }
    return d;
}

chaos::InputTransform RandomInputSpec::transform() const {
    std::vector<chaos::InputTransform::Dim> dims;
    dims.reserve(marginals.size());
    for (const auto& m : marginals) dims.push_back(m.transform_dim());
    return chaos::InputTransform(std::move(dims));
}

Eigen::MatrixXd lhs_sample(const RandomInputSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("lhs: sample count must be >= 1");
    const Eigen::Index m = spec.dim();
    if (m < 1) throw ConfigError("lhs: empty input spec");

    rng::Stream stream(seed);
    Eigen::MatrixXd points(n, m);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (Eigen::Index d = 0; d < m; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        rng::shuffle(perm, stream);
        for (int i = 0; i < n; ++i) {
            const double u =
                (static_cast<double>(perm[static_cast<std::size_t>(i)]) + stream.uniform01()) /
                static_cast<double>(n);
            points(i, d) = spec.marginals[static_cast<std::size_t>(d)].quantile(u);
        }
    }
    return points;
}

double rms(const Eigen::VectorXd& v) {
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

double rms(const Eigen::VectorXcd& v) {
    return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

namespace {

template <typename Vec>
double rms_error_impl(const Vec& exact, const Vec& approx) {
    if (exact.size() != approx.size()) throw ConfigError("rms_error: length mismatch");
    if (exact.size() == 0) throw ConfigError("rms_error: empty vectors");
    const double ref = rms(exact);
    if (ref == 0.0) throw NumericError("rms_error: reference vector is identically zero");
    Vec diff = exact - approx;
    return 100.0 * rms(diff) / ref;
}

}  // namespace

double rms_error(const Eigen::VectorXd& exact, const Eigen::VectorXd& approx) {
    return rms_error_impl(exact, approx);
}

double rms_error(const Eigen::VectorXcd& exact, const Eigen::VectorXcd& approx) {
    return rms_error_impl(exact, approx);
}

MomentAccumulator::MomentAccumulator(Eigen::Index n_channels, Eigen::Index n_freq)
    : sum_(Eigen::MatrixXcd::Zero(n_channels, n_freq)),
      sum_re2_(Eigen::MatrixXd::Zero(n_channels, n_freq)),
      sum_im2_(Eigen::MatrixXd::Zero(n_channels, n_freq)) {}

void MomentAccumulator::add(const Eigen::MatrixXcd& channels) {
    sum_ += channels;
    sum_re2_ += channels.real().cwiseProduct(channels.real());
    sum_im2_ += channels.imag().cwiseProduct(channels.imag());
    ++count_;
}

EnsembleMoments MomentAccumulator::finalize() const {
    if (count_ == 0) throw ConfigError("moments: empty ensemble");
    EnsembleMoments m;
    const double n = static_cast<double>(count_);
    m.mean = sum_ / n;
    // population std per part; tiny negative variances from roundoff clamp to 0
    const Eigen::MatrixXd var_re =
        (sum_re2_ / n - m.mean.real().cwiseProduct(m.mean.real())).cwiseMax(0.0);
    const Eigen::MatrixXd var_im =
        (sum_im2_ / n - m.mean.imag().cwiseProduct(m.mean.imag())).cwiseMax(0.0);
    m.std_dev.resize(sum_.rows(), sum_.cols());
    m.std_dev.real() = var_re.cwiseSqrt();
    m.std_dev.imag() = var_im.cwiseSqrt();
    return m;
}

EnsembleMoments ensemble_moments(const std::vector<dynsys::FrfSet>& frfs) {
    if (frfs.empty()) throw ConfigError("moments: empty ensemble");
    for (const auto& f : frfs)
        if (!(f.grid == frfs[0].grid)) throw ConfigError("moments: grids differ");
    MomentAccumulator acc(frfs[0].n_channels(), frfs[0].grid.size());
    for (const auto& f : frfs) acc.add(f.channels);
    return acc.finalize();
}

surrogate::ModelResponse StochasticModel::evaluate(const Eigen::VectorXd& x) const {
    const dynsys::MechModel mech = instantiate(x);
    const dynsys::StateSpace ss = dynsys::assemble_state_space(mech);
    surrogate::ModelResponse r;
    r.poles = dynsys::system_poles(ss);
    r.frf = dynsys::evaluate_frf(ss, grid);
    return r;
}

surrogate::FullModelEvaluator StochasticModel::evaluator() const {
    return [copy = *this](const Eigen::VectorXd& x) { return copy.evaluate(x); };
}

StochasticModel make_2dof() {
    StochasticModel m;
    m.name = "2dof";
    m.inputs.marginals = {Marginal::gaussian(15000.0, 0.05)};
    m.grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.01);
    m.instantiate = [](const Eigen::VectorXd& x) {
        const double k = x(0);
        const double c = 1.0;
        Eigen::MatrixXd mass = Eigen::MatrixXd::Identity(2, 2);
        Eigen::MatrixXd stiff(2, 2), damp(2, 2);
        stiff << 2.0 * k, -k, -k, k;
        damp << 2.0 * c, -c, -c, c;
        return dynsys::MechModel::from_selection(mass, damp, stiff, {0}, {0, 1});
    };
    return m;
}

StochasticModel make_6dof(double damping_scale, double grid_step) {
    StochasticModel m;
    m.name = "6dof";
    const std::vector<double> mean_mass = {50.0, 35.0, 12.0, 33.0, 100.0, 45.0};
    const std::vector<double> mean_k = {3000.0, 1725.0, 1200.0, 2200.0, 1320.0,
                                        1330.0, 1500.0, 2625.0, 1800.0, 850.0};
    for (double mm : mean_mass) m.inputs.marginals.push_back(Marginal::lognormal(mm, 0.05));
    for (double kk : mean_k) m.inputs.marginals.push_back(Marginal::lognormal(kk, 0.10));
    m.grid = FrequencyGrid::from_range(1.0, 25.0, grid_step);

    // spring wiring; -1 is ground. The two wall springs follow the reported
    // modal dampings, which transpose the k9/k10 drawing labels.
    static const int conn[10][2] = {{-1, 0}, {0, 1}, {0, 2}, {0, 5}, {1, 5},
                                    {2, 5},  {5, 3}, {5, 4}, {3, -1}, {4, -1}};
    Eigen::VectorXd vdiag(6);
    for (int i = 0; i < 6; ++i) vdiag(i) = damping_scale * mean_mass[static_cast<std::size_t>(i)];

    m.instantiate = [vdiag](const Eigen::VectorXd& x) {
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(6, 6);
        for (int i = 0; i < 6; ++i) mass(i, i) = x(i);
        Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(6, 6);
        for (int e = 0; e < 10; ++e) {
            const double k = x(6 + e);
            const int a = conn[e][0], b = conn[e][1];
            if (a >= 0) stiff(a, a) += k;
            if (b >= 0) stiff(b, b) += k;
            if (a >= 0 && b >= 0) {
                stiff(a, b) -= k;
                stiff(b, a) -= k;
            }
        }
        const Eigen::MatrixXd damp = vdiag.asDiagonal();
        return dynsys::MechModel::from_selection(mass, damp, stiff, {5}, {0, 1, 2, 3, 4, 5});
    };
    return m;
}

namespace {

/// |H| linearly interpolated at an arbitrary in-span frequency.
double magnitude_at(const dynsys::FrfSet& frf, Eigen::Index channel, double w) {
    const Eigen::VectorXd& x = frf.grid.values();
    const Eigen::Index n = x.size();
    if (w <= x(0)) return std::abs(frf.channels(channel, 0));
    if (w >= x(n - 1)) return std::abs(frf.channels(channel, n - 1));
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Eigen::Index mid = (lo + hi) / 2;
        (x(mid) <= w ? lo : hi) = mid;
    }
    const double t = (w - x(lo)) / (x(hi) - x(lo));
    const double a = std::abs(frf.channels(channel, lo));
    const double b = std::abs(frf.channels(channel, hi));
    return a + t * (b - a);
}

struct EnvelopeAccumulator {
    Eigen::MatrixXd min_mag, max_mag, sum_mag;
    void init(Eigen::Index nch, Eigen::Index nw) {
        min_mag = Eigen::MatrixXd::Constant(nch, nw, std::numeric_limits<double>::infinity());
        max_mag = Eigen::MatrixXd::Zero(nch, nw);
        sum_mag = Eigen::MatrixXd::Zero(nch, nw);
    }
    void add(const Eigen::MatrixXcd& channels) {
        const Eigen::MatrixXd mag = channels.cwiseAbs();
        min_mag = min_mag.cwiseMin(mag);
        max_mag = max_mag.cwiseMax(mag);
        sum_mag += mag;
    }
};

std::string tag_prefix(const StochasticModel& model, const CaseStudyOptions& opt) {
    std::string p = model.name;
    if (!opt.tag.empty()) p += "_" + opt.tag;
    p += "_seed" + std::to_string(opt.seed) + "_n" + std::to_string(opt.ed_size) + "_";
    return p;
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const StochasticModel& model,
                                              const std::vector<int>& ed_sizes,
                                              int reference_size, std::uint64_t seed,
                                              const surrogate::SurrogateSettings& settings) {
    if (ed_sizes.empty()) throw ConfigError("convergence: empty size list");
    for (int n : ed_sizes)
        if (n > reference_size)
            throw ConfigError("convergence: reference size must cover every design size");

    const Eigen::MatrixXd ref_pts =
        lhs_sample(model.inputs, reference_size, rng::derive_seed(seed, "validation"));
    const dynsys::MechModel probe = model.instantiate(ref_pts.row(0).transpose());
    const Eigen::Index nch = probe.n_outputs() * probe.n_inputs();
    const Eigen::Index nw = model.grid.size();

    // reference sweep; prefixes double as the size-N Monte-Carlo estimators,
    // so the MC error vanishes exactly when N reaches the reference size
    std::vector<int> sorted_sizes = ed_sizes;
    std::sort(sorted_sizes.begin(), sorted_sizes.end());
    MomentAccumulator ref_acc(nch, nw);
    std::vector<EnsembleMoments> mc_at_size;
    std::vector<int> mc_sizes;
    const int chunk = std::max(1, settings.threads) * 8;
    std::vector<dynsys::FrfSet> buffer(static_cast<std::size_t>(chunk));
    for (int base = 0; base < reference_size; base += chunk) {
        const int count = std::min(chunk, reference_size - base);
        parallel_for(count, settings.threads, [&](int i) {
            buffer[static_cast<std::size_t>(i)] =
                model.evaluate(ref_pts.row(base + i).transpose()).frf;
        });
        for (int i = 0; i < count; ++i) {
            ref_acc.add(buffer[static_cast<std::size_t>(i)].channels);
            const int done = base + i + 1;
            if (std::binary_search(sorted_sizes.begin(), sorted_sizes.end(), done)) {
                mc_at_size.push_back(ref_acc.finalize());
                mc_sizes.push_back(done);
            }
        }
    }
    const EnsembleMoments ref_mom = ref_acc.finalize();

    std::vector<ConvergenceRow> rows;
    for (int n : ed_sizes) {
        const Eigen::MatrixXd ed =
            lhs_sample(model.inputs, n, rng::derive_seed(seed, "ed-" + std::to_string(n)));
        const surrogate::FrfSurrogate s =
            surrogate::build(ed, model.evaluator(), model.inputs.transform(), settings);

        MomentAccumulator pce_acc(nch, nw);
        std::vector<dynsys::FrfSet> pred(static_cast<std::size_t>(chunk));
        for (int base = 0; base < reference_size; base += chunk) {
            const int count = std::min(chunk, reference_size - base);
            parallel_for(count, settings.threads, [&](int i) {
                pred[static_cast<std::size_t>(i)] = s.predict_frf(ref_pts.row(base + i).transpose());
            });
            for (int i = 0; i < count; ++i) pce_acc.add(pred[static_cast<std::size_t>(i)].channels);
        }
        const EnsembleMoments pce_mom = pce_acc.finalize();

        const auto it = std::find(mc_sizes.begin(), mc_sizes.end(), n);
        const EnsembleMoments& mc_mom = mc_at_size[static_cast<std::size_t>(it - mc_sizes.begin())];

        ConvergenceRow row;
        row.n_ed = n;
        row.pce_mean_err.resize(nch);
        row.mc_mean_err.resize(nch);
        row.pce_std_err.resize(nch);
        row.mc_std_err.resize(nch);
        for (Eigen::Index c = 0; c < nch; ++c) {
            row.pce_mean_err(c) =
                rms_error(Eigen::VectorXcd(ref_mom.mean.row(c)), Eigen::VectorXcd(pce_mom.mean.row(c)));
            row.mc_mean_err(c) =
                rms_error(Eigen::VectorXcd(ref_mom.mean.row(c)), Eigen::VectorXcd(mc_mom.mean.row(c)));
            row.pce_std_err(c) = rms_error(Eigen::VectorXcd(ref_mom.std_dev.row(c)),
                                           Eigen::VectorXcd(pce_mom.std_dev.row(c)));
            row.mc_std_err(c) = rms_error(Eigen::VectorXcd(ref_mom.std_dev.row(c)),
                                          Eigen::VectorXcd(mc_mom.std_dev.row(c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows) {
    io::CsvWriter csv({"n_ed", "channel", "pce_mean_err_pct", "mc_mean_err_pct",
                       "pce_std_err_pct", "mc_std_err_pct"});
    for (const auto& row : rows)
        for (Eigen::Index c = 0; c < row.pce_mean_err.size(); ++c)
            csv.add_row(std::vector<double>{static_cast<double>(row.n_ed),
                                            static_cast<double>(c), row.pce_mean_err(c),
                                            row.mc_mean_err(c), row.pce_std_err(c),
                                            row.mc_std_err(c)});
    csv.write(path);
}

CaseStudyReport validate_surrogate(const StochasticModel& model, const surrogate::FrfSurrogate& s,
                                   const CaseStudyOptions& opt) {
    using clock = std::chrono::steady_clock;
    if (opt.reference_size < opt.ed_size)
        throw ConfigError("case study: reference size must be >= design size");

    if (!(s.output_grid() == model.grid))
        throw ConfigError("validate: surrogate grid does not match the model grid");

    CaseStudyReport report;
    report.stage1_targets = s.stage1_target_count();
    report.stage1_models = s.stage1_model_count();
    report.stage2_models = s.stage2_model_count();
    report.max_degree = s.max_pce_degree();

    const Eigen::Index nch = s.n_channels();
    const Eigen::Index nw = model.grid.size();
    const int np = s.n_peaks();

    const Eigen::MatrixXd ref_pts = lhs_sample(model.inputs, opt.reference_size,
                                               rng::derive_seed(opt.seed, "validation"));

    const auto t1 = clock::now();
    MomentAccumulator true_acc(nch, nw), pce_acc(nch, nw), mc_acc(nch, nw);
    bool have_mc = false;
    EnsembleMoments mc_mom;
    EnvelopeAccumulator true_env, pce_env;
    true_env.init(nch, nw);
    pce_env.init(nch, nw);

    std::vector<double> pooled_errors;                    // point-level max over channels
    std::vector<std::vector<double>> channel_errors(static_cast<std::size_t>(nch));
    std::vector<double> peak_rel_errors;
    Eigen::VectorXd slope_num = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd slope_den = Eigen::VectorXd::Zero(np);

    const bool write_files = !opt.out_dir.empty();
    const std::string prefix = tag_prefix(model, opt);

    std::vector<std::string> scatter_header = {"point"};
    for (int i = 0; i < np; ++i) {
        scatter_header.push_back("peak" + std::to_string(i + 1) + "_true");
        scatter_header.push_back("peak" + std::to_string(i + 1) + "_pred");
    }
    for (Eigen::Index c = 0; c < nch; ++c)
        for (int i = 0; i + 1 < np; ++i) {
            scatter_header.push_back("valley_ch" + std::to_string(c) + "_" +
                                     std::to_string(i + 1) + "_true");
            scatter_header.push_back("valley_ch" + std::to_string(c) + "_" +
                                     std::to_string(i + 1) + "_pred");
        }
    io::CsvWriter scatter_csv(scatter_header);
    io::CsvWriter amp_csv({"point", "peak", "channel", "true_amplitude", "pred_amplitude"});
    io::CsvWriter err_csv({"point", "channel", "frf_err_pct"});

    struct PointEval {
        surrogate::ModelResponse truth;
        dynsys::FrfSet pred;
        sigproc::SelectedFrequencies true_sel, pred_sel;
    };
    const int chunk = std::max(1, opt.settings.threads) * 8;
    std::vector<PointEval> buf(static_cast<std::size_t>(chunk));

    for (int base = 0; base < opt.reference_size; base += chunk) {
        const int count = std::min(chunk, opt.reference_size - base);
        parallel_for(count, opt.settings.threads, [&](int i) {
            auto& pe = buf[static_cast<std::size_t>(i)];
            const Eigen::VectorXd x = ref_pts.row(base + i).transpose();
            pe.truth = model.evaluate(x);
            pe.true_sel = sigproc::extract_selected_frequencies(pe.truth.frf, pe.truth.poles);
            pe.pred = s.predict_frf(x);
            pe.pred_sel = s.predict_selected(x);
        });
        for (int i = 0; i < count; ++i) {
            const auto& pe = buf[static_cast<std::size_t>(i)];
            const int point = base + i;
            true_acc.add(pe.truth.frf.channels);
            pce_acc.add(pe.pred.channels);
            true_env.add(pe.truth.frf.channels);
            pce_env.add(pe.pred.channels);
            if (point < opt.ed_size) mc_acc.add(pe.truth.frf.channels);
            if (point + 1 == opt.ed_size) {
                mc_mom = mc_acc.finalize();
                have_mc = true;
            }

            double pooled = 0.0;
            for (Eigen::Index c = 0; c < nch; ++c) {
                const double e = rms_error(Eigen::VectorXcd(pe.truth.frf.channels.row(c)),
                                           Eigen::VectorXcd(pe.pred.channels.row(c)));
                channel_errors[static_cast<std::size_t>(c)].push_back(e);
                pooled = std::max(pooled, e);
                if (write_files)
                    err_csv.add_row(std::vector<double>{static_cast<double>(point),
                                                        static_cast<double>(c), e});
            }
            pooled_errors.push_back(pooled);

            std::vector<double> srow = {static_cast<double>(point)};
            for (int p = 0; p < np; ++p) {
                const double wt = pe.true_sel.rows(0, 2 * p + 1);
                const double wp = pe.pred_sel.rows(0, 2 * p + 1);
                peak_rel_errors.push_back(std::abs(wp - wt) / wt);
                slope_num(p) += wp * wt;
                slope_den(p) += wt * wt;
                srow.push_back(wt);
                srow.push_back(wp);
            }
            for (Eigen::Index c = 0; c < nch; ++c)
                for (int p = 0; p + 1 < np; ++p) {
                    srow.push_back(pe.true_sel.rows(c, 2 * p + 2));
                    srow.push_back(pe.pred_sel.rows(c, 2 * p + 2));
                }
            if (write_files) {
                scatter_csv.add_row(srow);
                for (int p = 0; p < np; ++p)
                    for (Eigen::Index c = 0; c < nch; ++c)
                        amp_csv.add_row(std::vector<double>{
                            static_cast<double>(point), static_cast<double>(p + 1),
                            static_cast<double>(c),
                            magnitude_at(pe.truth.frf, c, pe.true_sel.rows(0, 2 * p + 1)),
                            magnitude_at(pe.pred, c, pe.pred_sel.rows(0, 2 * p + 1))});
            }
        }
    }
    report.validate_seconds = std::chrono::duration<double>(clock::now() - t1).count();

    const EnsembleMoments true_mom = true_acc.finalize();
    const EnsembleMoments pce_mom = pce_acc.finalize();
    if (!have_mc) throw ConfigError("case study: reference sweep shorter than design size");

    report.pce_mean_err.resize(nch);
    report.mc_mean_err.resize(nch);
    report.pce_std_err.resize(nch);
    report.mc_std_err.resize(nch);
    for (Eigen::Index c = 0; c < nch; ++c) {
        report.pce_mean_err(c) = rms_error(Eigen::VectorXcd(true_mom.mean.row(c)),
                                           Eigen::VectorXcd(pce_mom.mean.row(c)));
        report.mc_mean_err(c) = rms_error(Eigen::VectorXcd(true_mom.mean.row(c)),
                                          Eigen::VectorXcd(mc_mom.mean.row(c)));
        report.pce_std_err(c) = rms_error(Eigen::VectorXcd(true_mom.std_dev.row(c)),
                                          Eigen::VectorXcd(pce_mom.std_dev.row(c)));
        report.mc_std_err(c) = rms_error(Eigen::VectorXcd(true_mom.std_dev.row(c)),
                                         Eigen::VectorXcd(mc_mom.std_dev.row(c)));
    }

    {
        std::vector<double> sorted = pooled_errors;
        std::sort(sorted.begin(), sorted.end());
        report.median_frf_err = sorted[sorted.size() / 2];
        report.max_frf_err = sorted.back();
        std::vector<double> speaks = peak_rel_errors;
        std::sort(speaks.begin(), speaks.end());
        report.median_peak_rel_err = speaks[speaks.size() / 2];
        report.peak_scatter_slopes = slope_num.cwiseQuotient(slope_den);
    }

    if (write_files) {
        scatter_csv.write(opt.out_dir / (prefix + "selected_freq_scatter.csv"));
        amp_csv.write(opt.out_dir / (prefix + "resonance_amplitudes.csv"));
        err_csv.write(opt.out_dir / (prefix + "frf_error_hist.csv"));

        io::CsvWriter mom_csv({"omega_rad_s", "channel", "true_mean_abs", "true_mean_arg",
                               "pce_mean_abs", "pce_mean_arg", "true_std_abs", "true_std_arg",
                               "pce_std_abs", "pce_std_arg"});
        io::CsvWriter env_csv({"omega_rad_s", "channel", "true_min", "true_mean", "true_max",
                               "pce_min", "pce_mean", "pce_max"});
        const double nref = static_cast<double>(opt.reference_size);
        for (Eigen::Index c = 0; c < nch; ++c)
            for (Eigen::Index l = 0; l < nw; ++l) {
                const double w = model.grid.values()(l);
                mom_csv.add_row(std::vector<double>{
                    w, static_cast<double>(c), std::abs(true_mom.mean(c, l)),
                    std::arg(true_mom.mean(c, l)), std::abs(pce_mom.mean(c, l)),
                    std::arg(pce_mom.mean(c, l)), std::abs(true_mom.std_dev(c, l)),
                    std::arg(true_mom.std_dev(c, l)), std::abs(pce_mom.std_dev(c, l)),
                    std::arg(pce_mom.std_dev(c, l))});
                env_csv.add_row(std::vector<double>{
                    w, static_cast<double>(c), true_env.min_mag(c, l),
                    true_env.sum_mag(c, l) / nref, true_env.max_mag(c, l), pce_env.min_mag(c, l),
                    pce_env.sum_mag(c, l) / nref, pce_env.max_mag(c, l)});
            }
        mom_csv.write(opt.out_dir / (prefix + "moments.csv"));
        env_csv.write(opt.out_dir / (prefix + "frf_envelope.csv"));

        // worst and typical individual predictions, re-evaluated
        std::vector<std::size_t> order(pooled_errors.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pooled_errors[a] < pooled_errors[b];
        });
        const Eigen::Index worst = static_cast<Eigen::Index>(order.back());
        const Eigen::Index typical = static_cast<Eigen::Index>(order[order.size() / 2]);
        io::CsvWriter ind_csv({"kind", "point", "omega_rad_s", "channel", "true_re", "true_im",
                               "pred_re", "pred_im"});
        for (const auto& [kind, idx] : {std::pair<const char*, Eigen::Index>{"worst", worst},
                                        std::pair<const char*, Eigen::Index>{"typical", typical}}) {
            const Eigen::VectorXd x = ref_pts.row(idx).transpose();
            const auto truth = model.evaluate(x);
            const auto pred = s.predict_frf(x);
            for (Eigen::Index c = 0; c < nch; ++c)
                for (Eigen::Index l = 0; l < nw; ++l)
                    ind_csv.add_row(std::vector<std::string>{
                        kind, std::to_string(idx), io::format_number(model.grid.values()(l)),
                        std::to_string(c), io::format_number(truth.frf.channels(c, l).real()),
                        io::format_number(truth.frf.channels(c, l).imag()),
                        io::format_number(pred.channels(c, l).real()),
                        io::format_number(pred.channels(c, l).imag())});
        }
        ind_csv.write(opt.out_dir / (prefix + "individual_frfs.csv"));

        std::ostringstream summary;
        summary << "case study: " << model.name
                << (opt.tag.empty() ? "" : " (" + opt.tag + ")") << "\n"
                << "seed: " << opt.seed << "\n"
                << "design size: " << opt.ed_size << "\n"
                << "reference size: " << opt.reference_size << "\n"
                << "grid points: " << nw << "\n"
                << "stage-1 scalar targets: " << report.stage1_targets
                << " (distinct models: " << report.stage1_models << ")\n"
                << "stage-2 component models: " << report.stage2_models << "\n"
                << "max PCE degree: " << report.max_degree << "\n"
                << "per-channel mean-FRF error %, surrogate vs MC(" << opt.ed_size << "):\n";
        for (Eigen::Index c = 0; c < nch; ++c)
            summary << "  channel " << c << ": " << io::format_number(report.pce_mean_err(c))
                    << " vs " << io::format_number(report.mc_mean_err(c)) << "\n";
        summary << "per-channel std-FRF error %, surrogate vs MC(" << opt.ed_size << "):\n";
        for (Eigen::Index c = 0; c < nch; ++c)
            summary << "  channel " << c << ": " << io::format_number(report.pce_std_err(c))
                    << " vs " << io::format_number(report.mc_std_err(c)) << "\n";
        summary << "per-FRF error %: median " << io::format_number(report.median_frf_err)
                << ", max " << io::format_number(report.max_frf_err) << "\n"
                << "peak prediction: median relative error "
                << io::format_number(report.median_peak_rel_err) << ", scatter slopes";
        for (int p = 0; p < np; ++p)
            summary << " " << io::format_number(report.peak_scatter_slopes(p));
        summary << "\nvalidation time s: " << io::format_number(report.validate_seconds) << "\n";
        io::atomic_write(opt.out_dir / (prefix + "summary.txt"), summary.str());
    }
    return report;
}

CaseStudyReport run_case_study(const StochasticModel& model, const CaseStudyOptions& opt) {
    using clock = std::chrono::steady_clock;
    const Eigen::MatrixXd ed = lhs_sample(
        model.inputs, opt.ed_size, rng::derive_seed(opt.seed, "ed-" + std::to_string(opt.ed_size)));
    const auto t0 = clock::now();
    const surrogate::FrfSurrogate s =
        surrogate::build(ed, model.evaluator(), model.inputs.transform(), opt.settings);
    const double build_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    CaseStudyReport report = validate_surrogate(model, s, opt);
    report.build_seconds = build_seconds;
    return report;
}

}  // namespace frfpce::bench

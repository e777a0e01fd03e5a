// Command-line front end: builds, persists and exercises FRF surrogates of
// stochastic mechanical systems. See README.md for the config schema.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "frfpce/bench.hpp"
#include "frfpce/config.hpp"
#include "frfpce/errors.hpp"
#include "frfpce/io.hpp"
#include "frfpce/rng.hpp"
#include "frfpce/surrogate.hpp"
#include "json.hpp"

namespace {

using namespace frfpce;

constexpr int kExitOk = 0;
constexpr int kExitUnknown = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> ed_size;
    std::optional<int> reference_size;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<double> damping_scale;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "JSON run configuration");
    if (config_required) opt->required();
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--ed-size", args.ed_size, "experimental design size (overrides config)");
    cmd->add_option("--reference-size", args.reference_size,
                    "validation sample size (overrides config)");
    cmd->add_option("--threads", args.threads, "worker thread cap (overrides config)");
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--damping-scale", args.damping_scale,
                    "6dof damping scale, e.g. 0.1 or 0.01 (overrides config)");
}

config::RunConfig resolve(const CommonArgs& args) {
    config::Overrides ov;
    ov.seed = args.seed;
    ov.ed_size = args.ed_size;
    ov.reference_size = args.reference_size;
    ov.threads = args.threads;
    ov.out_dir = args.out_dir;
    ov.damping_scale = args.damping_scale;
    return config::load_run_config(args.config_path, ov);
}

void write_frf_table(const std::filesystem::path& path, const dynsys::FrfSet& frf) {
    std::vector<std::string> header = {"omega_rad_s", "freq_hz"};
    for (Eigen::Index c = 0; c < frf.n_channels(); ++c) {
        header.push_back("ch" + std::to_string(c) + "_re");
        header.push_back("ch" + std::to_string(c) + "_im");
        header.push_back("ch" + std::to_string(c) + "_abs");
        header.push_back("ch" + std::to_string(c) + "_arg");
    }
    io::CsvWriter csv(header);
    for (Eigen::Index l = 0; l < frf.grid.size(); ++l) {
        std::vector<double> row = {frf.grid.values()(l), frf.grid.values()(l) / (2.0 * M_PI)};
        for (Eigen::Index c = 0; c < frf.n_channels(); ++c) {
            const auto h = frf.channels(c, l);
            row.push_back(h.real());
            row.push_back(h.imag());
            row.push_back(std::abs(h));
            row.push_back(std::arg(h));
        }
        csv.add_row(row);
    }
    csv.write(path);
}

Eigen::MatrixXd points_or_nominal(const std::string& points_path,
                                  const bench::RandomInputSpec& inputs) {
    if (!points_path.empty())
        return config::load_points(points_path, inputs.dim());
    Eigen::MatrixXd nominal(1, inputs.dim());
    for (Eigen::Index d = 0; d < inputs.dim(); ++d)
        nominal(0, d) = inputs.marginals[static_cast<std::size_t>(d)].mean;
    return nominal;
}

surrogate::FrfSurrogate load_bundle(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("bundle " + path + ": invalid JSON: " + e.what());
    }
    return surrogate::FrfSurrogate::from_json(j);
}

int cmd_simulate(const CommonArgs& args, const std::string& points_path) {
    const config::RunConfig cfg = resolve(args);
    const Eigen::MatrixXd pts = points_or_nominal(points_path, cfg.model.inputs);
    if (pts.rows() == 0) {
        std::cerr << "warning: empty point list, nothing to simulate\n";
        return kExitOk;
    }
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto resp = cfg.model.evaluate(pts.row(i).transpose());
        const auto path = cfg.out_dir / (cfg.model.name + "_simulate_point" +
                                         std::to_string(i) + ".csv");
        write_frf_table(path, resp.frf);
        std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

int cmd_build(const CommonArgs& args, const std::string& bundle_path) {
    const config::RunConfig cfg = resolve(args);
    const Eigen::MatrixXd ed =
        bench::lhs_sample(cfg.model.inputs, cfg.ed_size,
                          rng::derive_seed(cfg.seed, "ed-" + std::to_string(cfg.ed_size)));
    const surrogate::FrfSurrogate s =
        surrogate::build(ed, cfg.model.evaluator(), cfg.model.inputs.transform(), cfg.settings);
    const std::filesystem::path out =
        bundle_path.empty()
            ? cfg.out_dir / (cfg.model.name + "_seed" + std::to_string(cfg.seed) + "_n" +
                             std::to_string(cfg.ed_size) + "_surrogate.json")
            : std::filesystem::path(bundle_path);
    io::atomic_write(out, s.to_json().dump());
    std::cout << "bundle: " << out.string() << "\n"
              << "stage-1 PCEs (scalar targets): " << s.stage1_target_count()
              << " (distinct models: " << s.stage1_model_count() << ")\n"
              << "stage-2 PCEs (components): " << s.stage2_model_count() << "\n"
              << "max PCE degree: " << s.max_pce_degree() << "\n";
    return kExitOk;
}

int cmd_predict(const CommonArgs& args, const std::string& bundle_path,
                const std::string& points_path) {
    const surrogate::FrfSurrogate s = load_bundle(bundle_path);
    const std::filesystem::path out_dir = args.out_dir.value_or(".");

    // in-sample self check at the stored reference point
    {
        const auto pred = s.predict_frf(s.reference_point());
        Eigen::VectorXcd flat(pred.channels.size());
        Eigen::Index k = 0;
        for (Eigen::Index c = 0; c < pred.channels.rows(); ++c)
            for (Eigen::Index l = 0; l < pred.channels.cols(); ++l) flat(k++) = pred.channels(c, l);
        std::cout << "reference-point self check, rms error %: "
                  << bench::rms_error(s.reference_trajectory(), flat) << "\n";
    }

    if (points_path.empty()) return kExitOk;
    const Eigen::MatrixXd pts =
        config::load_points(points_path, s.reference_point().size());
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto pred = s.predict_frf(pts.row(i).transpose());
        const auto path = out_dir / ("predict_point" + std::to_string(i) + ".csv");
        write_frf_table(path, pred);
        std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

int cmd_validate(const CommonArgs& args, const std::string& bundle_path) {
    const config::RunConfig cfg = resolve(args);
    const surrogate::FrfSurrogate s = load_bundle(bundle_path);
    bench::CaseStudyOptions opt;
    opt.ed_size = cfg.ed_size;
    opt.reference_size = cfg.reference_size;
    opt.seed = cfg.seed;
    opt.settings = cfg.settings;
    opt.out_dir = cfg.out_dir;
    opt.tag = cfg.tag.empty() ? "validate" : cfg.tag + "_validate";
    const auto report = bench::validate_surrogate(cfg.model, s, opt);
    std::cout << "per-FRF error %: median " << report.median_frf_err << ", max "
              << report.max_frf_err << "\n"
              << "peak median relative error: " << report.median_peak_rel_err << "\n";
    return kExitOk;
}

int cmd_converge(const CommonArgs& args) {
    const config::RunConfig cfg = resolve(args);
    const auto rows = bench::convergence_study(cfg.model, cfg.convergence_sizes,
                                               cfg.reference_size, cfg.seed, cfg.settings);
    const auto path = cfg.out_dir / (cfg.model.name + "_seed" + std::to_string(cfg.seed) +
                                     "_convergence.csv");
    bench::write_convergence_csv(path, rows);
    std::cout << "wrote " << path.string() << "\n";
    for (const auto& r : rows)
        std::cout << "n=" << r.n_ed << " mean err % (pce vs mc): " << r.pce_mean_err.maxCoeff()
                  << " vs " << r.mc_mean_err.maxCoeff()
                  << "; std err %: " << r.pce_std_err.maxCoeff() << " vs "
                  << r.mc_std_err.maxCoeff() << "\n";
    return kExitOk;
}

int cmd_case_study(const CommonArgs& args) {
    const config::RunConfig cfg = resolve(args);
    bench::CaseStudyOptions opt;
    opt.ed_size = cfg.ed_size;
    opt.reference_size = cfg.reference_size;
    opt.seed = cfg.seed;
    opt.settings = cfg.settings;
    opt.out_dir = cfg.out_dir;
    opt.tag = cfg.tag;
    const auto report = bench::run_case_study(cfg.model, opt);
    std::cout << "stage-1 PCEs (scalar targets): " << report.stage1_targets << "\n"
              << "stage-2 PCEs (components): " << report.stage2_models << "\n"
              << "max PCE degree: " << report.max_degree << "\n"
              << "per-FRF error %: median " << report.median_frf_err << ", max "
              << report.max_frf_err << "\n"
              << "build s: " << report.build_seconds
              << ", validation s: " << report.validate_seconds << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse polynomial-chaos surrogates of frequency response functions"};
    app.require_subcommand(1);

    CommonArgs sim_args, build_args, pred_args, val_args, conv_args, case_args;
    std::string sim_points, build_bundle, pred_bundle, pred_points, val_bundle;

    auto* sim = app.add_subcommand("simulate", "evaluate the full model at given points");
    add_common(sim, sim_args);
    sim->add_option("--points", sim_points, "CSV of physical input points (default: nominal)");

    auto* bld = app.add_subcommand("build", "build and persist a surrogate bundle");
    add_common(bld, build_args);
    bld->add_option("--bundle", build_bundle, "bundle output path (default: under --out)");

    auto* prd = app.add_subcommand("predict", "predict FRFs from a persisted bundle");
    prd->add_option("--bundle", pred_bundle, "surrogate bundle path")->required();
    prd->add_option("--points", pred_points, "CSV of physical input points");
    prd->add_option("--out", pred_args.out_dir, "output directory");

    auto* val = app.add_subcommand("validate", "validate a bundle against the full model");
    add_common(val, val_args);
    val->add_option("--bundle", val_bundle, "surrogate bundle path")->required();

    auto* cnv = app.add_subcommand("converge", "surrogate vs Monte-Carlo convergence table");
    add_common(cnv, conv_args);

    auto* cas = app.add_subcommand("case-study", "full build + validation artifact set");
    add_common(cas, case_args);

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_args, sim_points);
        if (bld->parsed()) return cmd_build(build_args, build_bundle);
        if (prd->parsed()) return cmd_predict(pred_args, pred_bundle, pred_points);
        if (val->parsed()) return cmd_validate(val_args, val_bundle);
        if (cnv->parsed()) return cmd_converge(conv_args);
        if (cas->parsed()) return cmd_case_study(case_args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnknown;
    }
    return kExitUnknown;
}

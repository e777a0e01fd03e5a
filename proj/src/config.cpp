#include "frfpce/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "frfpce/errors.hpp"
#include "frfpce/io.hpp"
#include "json.hpp"

namespace frfpce::config {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* field, const char* context) {
    const auto it = j.find(field);
    if (it == j.end())
        throw ConfigError(std::string("config: missing field '") + context + field + "'");
    return *it;
}

double require_number(const json& j, const char* field, const char* context) {
    const json& v = require_field(j, field, context);
    if (!v.is_number())
        throw ConfigError(std::string("config: field '") + context + field + "' must be a number");
    return v.get<double>();
}

FrequencyGrid parse_grid(const json& g) {
    const double start = require_number(g, "start", "grid.");
    const double stop = require_number(g, "stop", "grid.");
    const double step = require_number(g, "step", "grid.");
    const std::string unit = require_field(g, "unit", "grid.").get<std::string>();
    if (unit == "hz")
        return FrequencyGrid::from_range_hz(start, stop, step);
    if (unit == "rad/s")
        return FrequencyGrid::from_range(start, stop, step);
    throw ConfigError("config: field 'grid.unit' must be \"hz\" or \"rad/s\"");
}

Eigen::MatrixXd parse_matrix(const json& j, const char* field) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(std::string("config: field 'system.") + field +
                          "' must be a matrix (array of rows)");
    const auto rows = j.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw ConfigError(std::string("config: field 'system.") + field + "' has ragged rows");
        m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::VectorXd>(
            rows[i].data(), static_cast<Eigen::Index>(rows[i].size()));
    }
    return m;
}

bench::Marginal parse_marginal(const json& j, std::size_t pos) {
    const std::string ctx = "inputs[" + std::to_string(pos) + "].";
    const std::string family = require_field(j, "family", ctx.c_str()).get<std::string>();
    const double mean = require_number(j, "mean", ctx.c_str());
    const double cov = require_number(j, "cov", ctx.c_str());
    if (cov < 0.0) throw ConfigError("config: field '" + ctx + "cov' must be >= 0");
    if (family == "gaussian") return bench::Marginal::gaussian(mean, cov);
    if (family == "lognormal") return bench::Marginal::lognormal(mean, cov);
    if (family == "uniform") return bench::Marginal::uniform(mean, cov);
    throw ConfigError("config: field '" + ctx + "family' must be gaussian, lognormal or uniform");
}

enum class Target { mass, damping, stiffness };

Target parse_target(const json& j, std::size_t pos) {
    const std::string ctx = "inputs[" + std::to_string(pos) + "].";
    const std::string t = require_field(j, "target", ctx.c_str()).get<std::string>();
    if (t == "mass") return Target::mass;
    if (t == "damping") return Target::damping;
    if (t == "stiffness") return Target::stiffness;
    throw ConfigError("config: field '" + ctx + "target' must be mass, damping or stiffness");
}

bench::StochasticModel parse_explicit_system(const json& root) {
    const json& sys = require_field(root, "system", "");
    bench::StochasticModel model;
    model.name = sys.value("name", std::string("system"));
    model.grid = parse_grid(require_field(root, "grid", ""));

    const Eigen::MatrixXd mass = parse_matrix(require_field(sys, "mass", "system."), "mass");
    const Eigen::MatrixXd damping =
        parse_matrix(require_field(sys, "damping", "system."), "damping");
    const Eigen::MatrixXd stiffness =
        parse_matrix(require_field(sys, "stiffness", "system."), "stiffness");
    const auto input_dofs =
        require_field(sys, "input_dofs", "system.").get<std::vector<int>>();
    const auto output_dofs =
        require_field(sys, "output_dofs", "system.").get<std::vector<int>>();
    // validate the nominal model once, up front
    dynsys::MechModel::from_selection(mass, damping, stiffness, input_dofs, output_dofs);

    const json& inputs = require_field(root, "inputs", "");
    if (!inputs.is_array() || inputs.empty())
        throw ConfigError("config: field 'inputs' must be a non-empty array");
    std::vector<Target> targets;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        model.inputs.marginals.push_back(parse_marginal(inputs[i], i));
        targets.push_back(parse_target(inputs[i], i));
    }

    // each input scales its target matrix by x / mean; several inputs on the
    // same matrix multiply
    std::vector<double> means;
    for (const auto& m : model.inputs.marginals) means.push_back(m.mean);
    model.instantiate = [mass, damping, stiffness, input_dofs, output_dofs, targets,
                         means](const Eigen::VectorXd& x) {
        double s_mass = 1.0, s_damp = 1.0, s_stiff = 1.0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double scale = x(static_cast<Eigen::Index>(i)) / means[i];
            switch (targets[i]) {
                case Target::mass: s_mass *= scale; break;
                case Target::damping: s_damp *= scale; break;
                case Target::stiffness: s_stiff *= scale; break;
            }
        }
        return dynsys::MechModel::from_selection(s_mass * mass, s_damp * damping,
                                                 s_stiff * stiffness, input_dofs, output_dofs);
    };
    return model;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
    json root;
    {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file " + path.string());
        try {
            in >> root;
        } catch (const json::parse_error& e) {
            throw ConfigError("config: invalid JSON in " + path.string() + ": " + e.what());
        }
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    RunConfig cfg;
    cfg.seed = overrides.seed.value_or(root.value("seed", std::uint64_t{1}));
    cfg.ed_size = overrides.ed_size.value_or(root.value("ed_size", 40));
    cfg.reference_size = overrides.reference_size.value_or(root.value("reference_size", 2000));
    cfg.out_dir = overrides.out_dir.value_or(root.value("out_dir", std::string(".")));
    if (cfg.ed_size < 1) throw ConfigError("config: field 'ed_size' must be >= 1");
    if (cfg.reference_size < 1) throw ConfigError("config: field 'reference_size' must be >= 1");

    const json& sys = require_field(root, "system", "");
    if (sys.contains("case_study")) {
        const std::string name = sys.at("case_study").get<std::string>();
        const double damping_scale =
            overrides.damping_scale.value_or(root.value("damping_scale", 0.1));
        if (name == "2dof") {
            cfg.model = bench::make_2dof();
            cfg.convergence_sizes = {10, 20, 30, 40, 50};
        } else if (name == "6dof") {
            cfg.model = bench::make_6dof(damping_scale);
            if (root.contains("grid")) cfg.model.grid = parse_grid(root.at("grid"));
            cfg.convergence_sizes = {100, 200, 400};
            if (damping_scale != 0.1)
                cfg.tag = "damp" + io::format_number(damping_scale);
        } else {
            throw ConfigError("config: field 'system.case_study' must be \"2dof\" or \"6dof\"");
        }
        if (name == "2dof" && root.contains("grid")) cfg.model.grid = parse_grid(root.at("grid"));
    } else {
        cfg.model = parse_explicit_system(root);
    }

    if (root.contains("convergence_sizes"))
        cfg.convergence_sizes = root.at("convergence_sizes").get<std::vector<int>>();

    if (root.contains("pce")) {
        const json& pce = root.at("pce");
        cfg.settings.pce.degree_min = pce.value("degree_min", 1);
        cfg.settings.pce.degree_max = pce.value("degree_max", 8);
        cfg.settings.pce.q_norm = pce.value("q_norm", 1.0);
        cfg.settings.pce.max_rank = pce.value("max_rank", 0);
        if (cfg.settings.pce.degree_min < 0 ||
            cfg.settings.pce.degree_max < cfg.settings.pce.degree_min)
            throw ConfigError("config: invalid 'pce.degree_min'/'pce.degree_max' range");
        if (!(cfg.settings.pce.q_norm > 0.0 && cfg.settings.pce.q_norm <= 1.0))
            throw ConfigError("config: field 'pce.q_norm' must be in (0, 1]");
    }
    if (root.contains("pca")) {
        const json& pca = root.at("pca");
        cfg.settings.energy_fraction_real = pca.value("energy_real", 0.99);
        cfg.settings.energy_fraction_imag = pca.value("energy_imag", 0.99);
        for (double e : {cfg.settings.energy_fraction_real, cfg.settings.energy_fraction_imag})
            if (!(e > 0.0 && e <= 1.0))
                throw ConfigError("config: field 'pca.energy_*' must be in (0, 1]");
    }
    cfg.settings.reference_index = root.value("reference_index", 0);
    cfg.settings.threads = overrides.threads.value_or(root.value("threads", 1));
    if (cfg.settings.threads < 1) throw ConfigError("config: field 'threads' must be >= 1");
    return cfg;
}

Eigen::MatrixXd load_points(const std::filesystem::path& path, Eigen::Index expected_dim) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open points file " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (...) {
                throw ConfigError("points file " + path.string() + ": bad number at line " +
                                  std::to_string(line_no));
            }
        }
        if (row.empty()) continue;
        if (static_cast<Eigen::Index>(row.size()) != expected_dim)
            throw ConfigError("points file " + path.string() + ": line " +
                              std::to_string(line_no) + " has " + std::to_string(row.size()) +
                              " columns, expected " + std::to_string(expected_dim));
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), expected_dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        pts.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(rows[i].data(), expected_dim);
    return pts;
}

}  // namespace frfpce::config

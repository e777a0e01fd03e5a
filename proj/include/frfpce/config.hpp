#ifndef FRFPCE_CONFIG_HPP
#define FRFPCE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frfpce/bench.hpp"
#include "frfpce/surrogate.hpp"

namespace frfpce::config {

/// Command-line overrides applied on top of the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> ed_size;
    std::optional<int> reference_size;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    std::optional<double> damping_scale;
};

/// A fully resolved run: the stochastic model plus every setting the
/// subcommands need.
struct RunConfig {
    bench::StochasticModel model;
    surrogate::SurrogateSettings settings;
    int ed_size = 40;
    int reference_size = 2000;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    std::vector<int> convergence_sizes;
    std::string tag;  // carried into output file names
};

/// Parses the JSON config file and applies overrides. Field problems raise
/// ConfigError naming the field. The schema is documented in the README.
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides);

/// Reads a points file: CSV rows of physical coordinates, optional header
/// lines starting with '#'. Returns an n x dim matrix (n may be 0).
Eigen::MatrixXd load_points(const std::filesystem::path& path, Eigen::Index expected_dim);

}  // namespace frfpce::config

#endif

#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "frfpce/bench.hpp"
#include "frfpce/errors.hpp"
#include "frfpce/rng.hpp"

using namespace frfpce;

TEST_SUITE_BEGIN("bench");

TEST_CASE("lhs: stratification on a unit uniform marginal") {
    bench::RandomInputSpec spec;
    spec.marginals = {bench::Marginal::uniform_bounds(0.0, 1.0)};
    const Eigen::MatrixXd pts = bench::lhs_sample(spec, 4, 7);
    REQUIRE(pts.rows() == 4);
    std::vector<bool> hit(4, false);
    for (int i = 0; i < 4; ++i) {
        const double u = pts(i, 0);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        hit[static_cast<std::size_t>(u * 4.0)] = true;
    }
    CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
}

TEST_CASE("lhs: stratification property across dimensions and sizes") {
    bench::RandomInputSpec spec;
    spec.marginals = {bench::Marginal::uniform_bounds(2.0, 6.0),
                      bench::Marginal::gaussian(10.0, 0.2),
                      bench::Marginal::lognormal(5.0, 0.3)};
    for (int n : {3, 8, 17}) {
        const Eigen::MatrixXd pts = bench::lhs_sample(spec, n, 91);
        // map back to uniform strata through each marginal's CDF ordering:
        // sort values; ranks must occupy distinct strata, i.e. the i-th order
        // statistic lies in stratum i
        for (int d = 0; d < 3; ++d) {
            Eigen::VectorXd col = pts.col(d);
            std::sort(col.begin(), col.end());
            for (int i = 0; i + 1 < n; ++i) CHECK(col(i) < col(i + 1));
            // strata check via quantile bounds
            for (int i = 0; i < n; ++i) {
                const double lo =
                    spec.marginals[static_cast<std::size_t>(d)].quantile(static_cast<double>(i) / n);
                const double hi = spec.marginals[static_cast<std::size_t>(d)].quantile(
                    static_cast<double>(i + 1) / n);
                CHECK(col(i) >= lo);
                CHECK(col(i) <= hi);
            }
        }
    }
}

TEST_CASE("lhs: deterministic under a fixed seed") {
    bench::RandomInputSpec spec;
    spec.marginals = {bench::Marginal::gaussian(15000.0, 0.05)};
    const Eigen::MatrixXd a = bench::lhs_sample(spec, 40, 123);
    const Eigen::MatrixXd b = bench::lhs_sample(spec, 40, 123);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd c = bench::lhs_sample(spec, 40, 124);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    CHECK(a.rows() == 40);  // the paper's 2-DOF design size
}

TEST_CASE("lhs: lognormal sample mean converges") {
    bench::RandomInputSpec spec;
    spec.marginals = {bench::Marginal::lognormal(3000.0, 0.10)};
    const Eigen::MatrixXd pts = bench::lhs_sample(spec, 10000, 5);
    const double mean = pts.col(0).mean();
    CHECK(std::abs(mean - 3000.0) / 3000.0 < 0.005);
}

TEST_CASE("rms error identities") {
    Eigen::VectorXd exact(2), approx(2);
    exact << 3.0, 4.0;
    approx << 3.0, 4.0;
    CHECK(bench::rms_error(exact, approx) == 0.0);
    CHECK(bench::rms_error(exact, Eigen::VectorXd::Zero(2)) == doctest::Approx(100.0));

    Eigen::VectorXd ones(2), offone(2);
    ones << 1.0, 1.0;
    offone << 1.0, 2.0;
    CHECK(bench::rms_error(ones, offone) ==
          doctest::Approx(100.0 / std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(bench::rms_error(Eigen::VectorXd(Eigen::VectorXd::Zero(3)),
                                     Eigen::VectorXd(Eigen::VectorXd::Ones(3))),
                    NumericError);
    CHECK_THROWS_AS(bench::rms_error(exact, Eigen::VectorXd(Eigen::VectorXd::Ones(3))),
                    ConfigError);
}

TEST_CASE("rms error scale invariance, real and complex") {
    rng::Stream stream(3);
    Eigen::VectorXd exact(10), approx(10);
    for (int i = 0; i < 10; ++i) {
        exact(i) = stream.uniform01() + 0.5;
        approx(i) = exact(i) + 0.1 * (stream.uniform01() - 0.5);
    }
    const double base = bench::rms_error(exact, approx);
    for (double c : {2.0, -7.5, 1e6}) {
        CHECK(bench::rms_error(Eigen::VectorXd(c * exact), Eigen::VectorXd(c * approx)) ==
              doctest::Approx(base).epsilon(1e-12));
    }
    Eigen::VectorXcd ce = exact.cast<std::complex<double>>();
    Eigen::VectorXcd ca = approx.cast<std::complex<double>>();
    const std::complex<double> rot(0.6, 0.8);  // modulus 1
    CHECK(bench::rms_error(Eigen::VectorXcd(rot * ce), Eigen::VectorXcd(rot * ca)) ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("ensemble moments: degenerate cases") {
    auto model = bench::make_2dof();
    model.grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.25);
    const auto a = model.evaluate((Eigen::VectorXd(1) << 15000.0).finished()).frf;
    const auto b = model.evaluate((Eigen::VectorXd(1) << 15700.0).finished()).frf;

    const auto single = bench::ensemble_moments({a});
    CHECK((single.mean - a.channels).cwiseAbs().maxCoeff() == 0.0);
    CHECK(single.std_dev.cwiseAbs().maxCoeff() == 0.0);

    const auto pair = bench::ensemble_moments({a, b});
    const Eigen::MatrixXcd expected = 0.5 * (a.channels + b.channels);
    CHECK((pair.mean - expected).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(bench::ensemble_moments({}), ConfigError);
}

TEST_CASE("ensemble moments: std magnitude peaks near resonances") {
    auto model = bench::make_2dof();
    model.grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.02);
    std::vector<dynsys::FrfSet> frfs;
    const Eigen::MatrixXd pts = bench::lhs_sample(model.inputs, 50, 17);
    for (int i = 0; i < pts.rows(); ++i)
        frfs.push_back(model.evaluate(pts.row(i).transpose()).frf);
    const auto mom = bench::ensemble_moments(frfs);

    const double w1 = std::sqrt(15000.0 * (3.0 - std::sqrt(5.0)) / 2.0);
    const double w2 = std::sqrt(15000.0 * (3.0 + std::sqrt(5.0)) / 2.0);
    for (Eigen::Index c = 0; c < 2; ++c) {
        Eigen::Index arg = 0;
        mom.std_dev.row(c).cwiseAbs().maxCoeff(&arg);
        const double w = model.grid.values()(arg);
        const bool near_peak = std::abs(w - w1) < 5.0 || std::abs(w - w2) < 5.0;
        CHECK(near_peak);
    }
}

TEST_CASE("2dof case study definition matches the reported setup") {
    const auto model = bench::make_2dof();
    REQUIRE(model.inputs.marginals.size() == 1);
    CHECK(model.inputs.marginals[0].kind == bench::Marginal::Kind::gaussian);
    CHECK(model.inputs.marginals[0].mean == 15000.0);
    CHECK(model.inputs.marginals[0].cov == 0.05);
    CHECK(model.grid.size() == 2501);

    const auto mech = model.instantiate((Eigen::VectorXd(1) << 15000.0).finished());
    CHECK(mech.stiffness()(0, 0) == 30000.0);
    CHECK(mech.stiffness()(0, 1) == -15000.0);
    CHECK(mech.damping()(1, 1) == 1.0);
    CHECK(mech.mass()(0, 0) == 1.0);
}

TEST_CASE("6dof case study reproduces the reported modal dampings") {
    const auto model = bench::make_6dof();
    REQUIRE(model.inputs.marginals.size() == 16);
    CHECK(model.inputs.marginals[0].mean == 50.0);
    CHECK(model.inputs.marginals[0].cov == 0.05);
    CHECK(model.inputs.marginals[6].mean == 3000.0);
    CHECK(model.inputs.marginals[6].cov == 0.10);
    CHECK(model.grid.front() == 1.0);
    CHECK(model.grid.back() <= 25.0);
    // 1..25 rad/s at 0.01*pi steps; the nominal count documented for this grid
    CHECK(model.grid.size() == 764);

    Eigen::VectorXd nominal(16);
    for (int i = 0; i < 16; ++i) nominal(i) = model.inputs.marginals[static_cast<std::size_t>(i)].mean;
    const auto ss = dynsys::assemble_state_space(model.instantiate(nominal));
    const auto poles = dynsys::system_poles(ss);

    std::vector<double> zetas;
    for (const auto& p : poles)
        if (p.imag() > 0.0) zetas.push_back(-p.real() / std::abs(p) * 100.0);
    std::sort(zetas.begin(), zetas.end(), std::greater<>());
    REQUIRE(zetas.size() == 6);
    const double reported[6] = {1.30, 0.72, 0.52, 0.44, 0.33, 0.30};
    for (int i = 0; i < 6; ++i) CHECK(std::abs(zetas[static_cast<std::size_t>(i)] - reported[i]) < 0.015);

    // low-damping variant scales the modal dampings down tenfold
    const auto low = bench::make_6dof(0.01);
    const auto lowpoles = dynsys::system_poles(dynsys::assemble_state_space(low.instantiate(nominal)));
    std::vector<double> lowzetas;
    for (const auto& p : lowpoles)
        if (p.imag() > 0.0) lowzetas.push_back(-p.real() / std::abs(p) * 100.0);
    std::sort(lowzetas.begin(), lowzetas.end(), std::greater<>());
    for (int i = 0; i < 6; ++i)
        CHECK(lowzetas[static_cast<std::size_t>(i)] ==
              doctest::Approx(zetas[static_cast<std::size_t>(i)] / 10.0).epsilon(1e-3));
}

TEST_CASE("convergence study: self-comparison limit and shape") {
    auto model = bench::make_2dof();
    model.grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.1);
    surrogate::SurrogateSettings settings;
    settings.pce.degree_max = 5;
    const auto rows = bench::convergence_study(model, {10, 30}, 30, 42, settings);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n_ed == 10);
    CHECK(rows[1].n_ed == 30);
    // the MC branch at N = reference size is the reference itself
    CHECK(rows[1].mc_mean_err.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rows[1].mc_std_err.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rows[0].mc_mean_err.minCoeff() > 0.0);
    // surrogate errors are finite and small
    CHECK(rows[0].pce_mean_err.maxCoeff() < 50.0);
    CHECK(rows[1].pce_mean_err.maxCoeff() < 50.0);
}

TEST_CASE("property: median MC moment error decreases with the sample size") {
    auto model = bench::make_2dof();
    model.grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.25);
    const int sizes[3] = {5, 15, 45};
    const int reference = 100;
    std::vector<std::vector<double>> errs(3);

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Eigen::MatrixXd pts = bench::lhs_sample(model.inputs, reference, seed * 1000);
        std::vector<dynsys::FrfSet> frfs;
        for (int i = 0; i < reference; ++i)
            frfs.push_back(model.evaluate(pts.row(i).transpose()).frf);
        const auto ref_mom = bench::ensemble_moments(frfs);
        for (int t = 0; t < 3; ++t) {
            std::vector<dynsys::FrfSet> prefix(frfs.begin(), frfs.begin() + sizes[t]);
            const auto mc = bench::ensemble_moments(prefix);
            double err = 0.0;
            for (Eigen::Index c = 0; c < 2; ++c)
                err = std::max(err, bench::rms_error(Eigen::VectorXcd(ref_mom.mean.row(c)),
                                                     Eigen::VectorXcd(mc.mean.row(c))));
            errs[static_cast<std::size_t>(t)].push_back(err);
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    const double m0 = median(errs[0]), m1 = median(errs[1]), m2 = median(errs[2]);
    CHECK(m1 < m0);
    CHECK(m2 < m1);
}

TEST_SUITE_END();

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "frfpce/dynsys.hpp"
#include "frfpce/errors.hpp"
#include "frfpce/rng.hpp"

using namespace frfpce;
using dynsys::MechModel;

namespace {

MechModel two_dof_table1(double k = 15000.0, double c = 1.0) {
    Eigen::MatrixXd mass = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd stiff(2, 2), damp(2, 2);
    stiff << 2 * k, -k, -k, k;
    damp << 2 * c, -c, -c, c;
    return MechModel::from_selection(mass, damp, stiff, {0}, {0, 1});
}

MechModel one_dof(double m, double c, double k) {
    Eigen::MatrixXd mm(1, 1), cc(1, 1), kk(1, 1);
    mm << m;
    cc << c;
    kk << k;
    return MechModel::from_selection(mm, cc, kk, {0}, {0});
}

/// Deterministic random SPD matrix for property tests.
Eigen::MatrixXd random_spd(int n, rng::Stream& stream, double shift = 0.5) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 2.0 * stream.uniform01() - 1.0;
    return a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_SUITE_BEGIN("dynsys");

TEST_CASE("mech model validation") {
    Eigen::MatrixXd mass = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd sym = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.4, 1.0;

    CHECK_THROWS_AS(MechModel::from_selection(asym, sym, sym, {0}, {0}), ConfigError);
    CHECK_THROWS_AS(MechModel::from_selection(mass, asym, sym, {0}, {0}), ConfigError);
    CHECK_THROWS_AS(MechModel::from_selection(mass, sym, asym, {0}, {0}), ConfigError);

    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(MechModel::from_selection(indefinite, sym, sym, {0}, {0}), ConfigError);

    CHECK_THROWS_AS(MechModel::from_selection(mass, sym, sym, {2}, {0}), ConfigError);
    CHECK_THROWS_AS(MechModel::from_selection(mass, sym, sym, {0}, {}), ConfigError);
}

TEST_CASE("state space assembly: unit oscillator") {
    const auto ss = dynsys::assemble_state_space(one_dof(1.0, 0.0, 1.0));
    Eigen::MatrixXd expected(2, 2);
    expected << 0.0, 1.0, -1.0, 0.0;
    CHECK((ss.a - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(ss.b(0, 0) == 0.0);
    CHECK(ss.b(1, 0) == 1.0);
}

TEST_CASE("state space assembly: table-1 chain") {
    const auto ss = dynsys::assemble_state_space(two_dof_table1());
    Eigen::MatrixXd expected(2, 2);
    expected << 30000.0, -15000.0, -15000.0, 15000.0;
    CHECK((ss.a.bottomLeftCorner(2, 2) + expected).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(ss.a.topLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ss.a.topRightCorner(2, 2) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("state space assembly: scaled mass") {
    // hand-inverse oracle: M = 2I, K = I, V = 0 -> lower-left = -0.5 I
    Eigen::MatrixXd mass = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd damp = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd stiff = Eigen::MatrixXd::Identity(3, 3);
    const auto ss =
        dynsys::assemble_state_space(MechModel::from_selection(mass, damp, stiff, {0}, {0}));
    CHECK((ss.a.bottomLeftCorner(3, 3) + 0.5 * Eigen::MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("singular mass rejected") {
    // PD but with condition number far beyond 1e14
    Eigen::MatrixXd mass(2, 2);
    mass << 1.0, 0.0, 0.0, 1e-16;
    Eigen::MatrixXd sym = Eigen::MatrixXd::Identity(2, 2);
    const auto model = MechModel::from_selection(mass, sym, sym, {0}, {0});
    CHECK_THROWS_AS(dynsys::assemble_state_space(model), NumericError);
}

TEST_CASE("frf: scalar formula") {
    // 1-DOF m=1, k=1, c=0 at omega=2: H = 1/(k - m w^2) = -1/3
    const auto ss = dynsys::assemble_state_space(one_dof(1.0, 0.0, 1.0));
    const auto grid = FrequencyGrid::from_values((Eigen::VectorXd(2) << 2.0, 3.0).finished());
    const auto frf = dynsys::evaluate_frf(ss, grid);
    CHECK(frf.channels(0, 0).real() == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(frf.channels(0, 0).imag() == doctest::Approx(0.0));
}

TEST_CASE("frf: static flexibility limit") {
    const auto model = two_dof_table1();
    const auto ss = dynsys::assemble_state_space(model);
    const auto grid = FrequencyGrid::from_values((Eigen::VectorXd(2) << 1e-4, 1.0).finished());
    const auto frf = dynsys::evaluate_frf(ss, grid);
    // oracle: H(0) = K^-1 P_u
    const Eigen::VectorXd flex = model.stiffness().lu().solve(model.input_map().col(0));
    CHECK(flex(0) == doctest::Approx(1.0 / 15000.0).epsilon(1e-12));
    CHECK(std::abs(frf.channels(0, 0) - std::complex<double>(flex(0), 0.0)) <
          1e-6 * std::abs(flex(0)));
    CHECK(std::abs(frf.channels(1, 0) - std::complex<double>(flex(1), 0.0)) <
          1e-6 * std::abs(flex(1)));
}

TEST_CASE("frf: paper grid size") {
    const auto grid = FrequencyGrid::from_range_hz(10.0, 35.0, 0.01);
    CHECK(grid.size() == 2501);
    const auto frf = dynsys::evaluate_frf(dynsys::assemble_state_space(two_dof_table1()), grid);
    CHECK(frf.channels.rows() == 2);
    CHECK(frf.channels.cols() == 2501);
    CHECK(frf.channels.allFinite());
}

TEST_CASE("frf: singular resolvent at an undamped pole") {
    const auto ss = dynsys::assemble_state_space(one_dof(1.0, 0.0, 1.0));
    const auto grid =
        FrequencyGrid::from_values((Eigen::VectorXd(3) << 0.5, 1.0, 1.5).finished());
    CHECK_THROWS_AS(dynsys::evaluate_frf(ss, grid), NumericError);
}

TEST_CASE("poles: undamped oscillator") {
    const auto poles = dynsys::system_poles(dynsys::assemble_state_space(one_dof(1, 0, 1)));
    REQUIRE(poles.size() == 2);
    CHECK(poles[0].imag() == doctest::Approx(-1.0));
    CHECK(poles[1].imag() == doctest::Approx(1.0));
    CHECK(std::abs(poles[0].real()) < 1e-12);
}

TEST_CASE("poles: table-1 damped frequencies") {
    const auto poles = dynsys::system_poles(dynsys::assemble_state_space(two_dof_table1()));
    REQUIRE(poles.size() == 4);
    // analytic oracle: undamped w^2 = k (3 -/+ sqrt 5)/2, light damping
    const double w1 = std::sqrt(15000.0 * (3.0 - std::sqrt(5.0)) / 2.0);
    const double w2 = std::sqrt(15000.0 * (3.0 + std::sqrt(5.0)) / 2.0);
    CHECK(std::abs(poles[0].imag()) == doctest::Approx(w1).epsilon(1e-4));
    CHECK(std::abs(poles[3].imag()) == doctest::Approx(w2).epsilon(1e-4));
    // inside the paper's 10..35 Hz window
    CHECK(w1 / (2 * M_PI) > 10.0);
    CHECK(w2 / (2 * M_PI) < 35.0);
}

TEST_CASE("poles: damped real part") {
    // quadratic-formula oracle: m=1, c=1, k=15000 -> Re = -c/(2m) = -0.5
    const auto poles = dynsys::system_poles(dynsys::assemble_state_space(one_dof(1, 1, 15000)));
    CHECK(poles[0].real() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(poles[1].real() == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("property: undamped frf equals direct flexibility formula") {
    rng::Stream stream(20240811);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 3;
        const Eigen::MatrixXd stiff = 100.0 * random_spd(n, stream);
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) mass(i, i) = 0.5 + stream.uniform01();
        const Eigen::MatrixXd damp = Eigen::MatrixXd::Zero(n, n);
        const auto model = MechModel::from_selection(mass, damp, stiff, {0, 1, 2}, {0, 1, 2});
        const auto ss = dynsys::assemble_state_space(model);

        const double w = 0.3 + stream.uniform01();
        const auto grid =
            FrequencyGrid::from_values((Eigen::VectorXd(2) << w, w + 1000.0).finished());
        const auto frf = dynsys::evaluate_frf(ss, grid);

        const Eigen::MatrixXd direct =
            (stiff - w * w * mass).lu().solve(Eigen::MatrixXd::Identity(n, n));
        for (int iy = 0; iy < n; ++iy)
            for (int iu = 0; iu < n; ++iu) {
                const auto h = frf.channels(dynsys::FrfSet::channel_index(iy, iu, n), 0);
                CHECK(std::abs(h - std::complex<double>(direct(iy, iu), 0.0)) <=
                      1e-10 * std::abs(direct(iy, iu)) + 1e-16);
            }
    }
}

TEST_CASE("property: reciprocity for collocated channels") {
    // P_u = I and displacement outputs make H the inverse of a symmetric
    // matrix, so H_ij = H_ji
    rng::Stream stream(7);
    const int n = 4;
    const Eigen::MatrixXd stiff = 500.0 * random_spd(n, stream);
    const Eigen::MatrixXd damp = 0.05 * random_spd(n, stream);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) mass(i, i) = 1.0 + stream.uniform01();
    const auto model = MechModel::from_selection(mass, damp, stiff, {0, 1, 2, 3}, {0, 1, 2, 3});
    const auto frf = dynsys::evaluate_frf(
        dynsys::assemble_state_space(model),
        FrequencyGrid::from_values((Eigen::VectorXd(3) << 1.0, 5.0, 20.0).finished()));

    for (int l = 0; l < 3; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto hij = frf.channels(dynsys::FrfSet::channel_index(i, j, n), l);
                const auto hji = frf.channels(dynsys::FrfSet::channel_index(j, i, n), l);
                CHECK(std::abs(hij - hji) <= 1e-10 * std::abs(hij) + 1e-14);
            }
}

TEST_CASE("property: stable damped poles have negative real part") {
    rng::Stream stream(99);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 3;
        const Eigen::MatrixXd stiff = 200.0 * random_spd(n, stream);
        const Eigen::MatrixXd damp = 0.2 * random_spd(n, stream, 1.0);
        Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) mass(i, i) = 1.0 + stream.uniform01();
        const auto model = MechModel::from_selection(mass, damp, stiff, {0}, {0});
        for (const auto& p : dynsys::system_poles(dynsys::assemble_state_space(model)))
            CHECK(p.real() < 0.0);
    }
}

TEST_SUITE_END();

#include "frfpce/dynsys.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "frfpce/errors.hpp"

namespace frfpce::dynsys {

namespace {

void require_symmetric(const Eigen::MatrixXd& m, const char* name) {
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1e-300))
        throw ConfigError(std::string("mech model: ") + name + " matrix is not symmetric");
}

}  // namespace

MechModel MechModel::create(Eigen::MatrixXd mass, Eigen::MatrixXd damping,
                            Eigen::MatrixXd stiffness, Eigen::MatrixXd input_map,
                            Eigen::MatrixXd output_map, Eigen::MatrixXd throughput) {
    const Eigen::Index n = mass.rows();
    if (n < 1 || mass.cols() != n) throw ConfigError("mech model: mass must be square, n >= 1");
    if (damping.rows() != n || damping.cols() != n)
        throw ConfigError("mech model: damping dimensions inconsistent with mass");
    if (stiffness.rows() != n || stiffness.cols() != n)
        throw ConfigError("mech model: stiffness dimensions inconsistent with mass");
    if (input_map.rows() != n || input_map.cols() < 1)
        throw ConfigError("mech model: input map must be n x n_u with n_u >= 1");
    if (output_map.cols() != 2 * n || output_map.rows() < 1)
        throw ConfigError("mech model: output map must be n_y x 2n with n_y >= 1");
    if (throughput.rows() != output_map.rows() || throughput.cols() != input_map.cols())
        throw ConfigError("mech model: throughput must be n_y x n_u");

    require_symmetric(mass, "mass");
    require_symmetric(damping, "damping");
    require_symmetric(stiffness, "stiffness");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mass, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("mech model: mass matrix is not positive definite");

    MechModel m;
    m.mass_ = std::move(mass);
    m.damping_ = std::move(damping);
    m.stiffness_ = std::move(stiffness);
    m.input_map_ = std::move(input_map);
    m.output_map_ = std::move(output_map);
    m.throughput_ = std::move(throughput);
    return m;
}

MechModel MechModel::from_selection(Eigen::MatrixXd mass, Eigen::MatrixXd damping,
                                    Eigen::MatrixXd stiffness,
                                    const std::vector<int>& input_dofs,
                                    const std::vector<int>& output_dofs) {
    const Eigen::Index n = mass.rows();
    if (input_dofs.empty()) throw ConfigError("mech model: empty input DOF list");
    if (output_dofs.empty()) throw ConfigError("mech model: empty output DOF list");

    Eigen::MatrixXd pu = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(input_dofs.size()));
    for (std::size_t j = 0; j < input_dofs.size(); ++j) {
        if (input_dofs[j] < 0 || input_dofs[j] >= n)
            throw ConfigError("mech model: input DOF index out of range: " +
                              std::to_string(input_dofs[j]));
        pu(input_dofs[j], static_cast<Eigen::Index>(j)) = 1.0;
    }
    Eigen::MatrixXd c =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(output_dofs.size()), 2 * n);
    for (std::size_t i = 0; i < output_dofs.size(); ++i) {
        if (output_dofs[i] < 0 || output_dofs[i] >= n)
            throw ConfigError("mech model: output DOF index out of range: " +
                              std::to_string(output_dofs[i]));
        c(static_cast<Eigen::Index>(i), output_dofs[i]) = 1.0;
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(c.rows(), pu.cols());
    return create(std::move(mass), std::move(damping), std::move(stiffness), std::move(pu),
                  std::move(c), std::move(d));
}

StateSpace assemble_state_space(const MechModel& model) {
    const Eigen::Index n = model.dof();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(model.mass());
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double smax = svd.singularValues()(0);
    if (smin <= 0.0 || smax / smin > 1e14)
        throw NumericError("state space: mass matrix is numerically singular");

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(model.mass());
    const Eigen::MatrixXd minv_k = lu.solve(model.stiffness());
    const Eigen::MatrixXd minv_v = lu.solve(model.damping());
    const Eigen::MatrixXd minv_p = lu.solve(model.input_map());

    StateSpace ss;
    ss.a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.a.topRightCorner(n, n).setIdentity();
    ss.a.bottomLeftCorner(n, n) = -minv_k;
    ss.a.bottomRightCorner(n, n) = -minv_v;
    ss.b = Eigen::MatrixXd::Zero(2 * n, model.n_inputs());
    ss.b.bottomRows(n) = minv_p;
    ss.c = model.output_map();
    ss.d = model.throughput();
    return ss;
}

FrfSet evaluate_frf(const StateSpace& ss, const FrequencyGrid& grid) {
    const Eigen::Index order = ss.order();
    const Eigen::Index nu = ss.n_inputs();
    const Eigen::Index ny = ss.n_outputs();
    const Eigen::Index nw = grid.size();

    FrfSet out;
    out.grid = grid;
    out.n_inputs = nu;
    out.n_outputs = ny;
    out.channels.resize(ny * nu, nw);

    const Eigen::MatrixXcd a = ss.a.cast<std::complex<double>>();
    const Eigen::MatrixXcd b = ss.b.cast<std::complex<double>>();
    const Eigen::MatrixXcd c = ss.c.cast<std::complex<double>>();
    const Eigen::MatrixXcd d = ss.d.cast<std::complex<double>>();

    Eigen::MatrixXcd resolvent(order, order);
    for (Eigen::Index l = 0; l < nw; ++l) {
        const std::complex<double> jw(0.0, grid.values()(l));
        resolvent = -a;
        resolvent.diagonal().array() += jw;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
        if (lu.rcond() < 1e-14)
            throw NumericError("frf: resolvent singular at omega = " +
                               std::to_string(grid.values()(l)) + " rad/s");
        const Eigen::MatrixXcd h = c * lu.solve(b) + d;  // n_y x n_u
        for (Eigen::Index iy = 0; iy < ny; ++iy)
            for (Eigen::Index iu = 0; iu < nu; ++iu)
                out.channels(FrfSet::channel_index(iy, iu, nu), l) = h(iy, iu);
    }
    if (!out.channels.allFinite()) throw NumericError("frf: non-finite amplitude produced");
    return out;
}

std::vector<std::complex<double>> system_poles(const StateSpace& ss) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.a, false);
    if (es.info() != Eigen::Success)
        throw NumericError("poles: eigenvalue computation did not converge");
    std::vector<std::complex<double>> poles(es.eigenvalues().data(),
                                            es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(poles.begin(), poles.end(), [](const auto& p, const auto& q) {
        const double ap = std::abs(p.imag()), aq = std::abs(q.imag());
        if (ap != aq) return ap < aq;
        if (p.real() != q.real()) return p.real() < q.real();
        return p.imag() < q.imag();
    });
    return poles;
}

}  // namespace frfpce::dynsys

#ifndef FRFPCE_DYNSYS_HPP
#define FRFPCE_DYNSYS_HPP

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "frfpce/grid.hpp"

namespace frfpce::dynsys {

/// Second-order mechanical model M q'' + V q' + K q = P_u u with output
/// y = C x + D u on the state x = [q; q'].
class MechModel {
public:
    /// Validates symmetry (1e-12 relative), positive-definite mass and
    /// dimension consistency.
    static MechModel create(Eigen::MatrixXd mass, Eigen::MatrixXd damping,
                            Eigen::MatrixXd stiffness, Eigen::MatrixXd input_map,
                            Eigen::MatrixXd output_map, Eigen::MatrixXd throughput);

    /// Builds the Boolean input map and a displacement-selecting output map
    /// from DOF index lists (0-based); throughput is zero.
    static MechModel from_selection(Eigen::MatrixXd mass, Eigen::MatrixXd damping,
                                    Eigen::MatrixXd stiffness,
                                    const std::vector<int>& input_dofs,
                                    const std::vector<int>& output_dofs);

    const Eigen::MatrixXd& mass() const { return mass_; }
    const Eigen::MatrixXd& damping() const { return damping_; }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::MatrixXd& input_map() const { return input_map_; }
    const Eigen::MatrixXd& output_map() const { return output_map_; }
    const Eigen::MatrixXd& throughput() const { return throughput_; }

    Eigen::Index dof() const { return mass_.rows(); }
    Eigen::Index n_inputs() const { return input_map_.cols(); }
    Eigen::Index n_outputs() const { return output_map_.rows(); }

private:
    MechModel() = default;
    Eigen::MatrixXd mass_, damping_, stiffness_, input_map_, output_map_, throughput_;
};

/// First-order realization x' = a x + b u, y = c x + d u.
struct StateSpace {
    Eigen::MatrixXd a, b, c, d;
    Eigen::Index order() const { return a.rows(); }
    Eigen::Index n_inputs() const { return b.cols(); }
    Eigen::Index n_outputs() const { return c.rows(); }
};

/// Complex FRF amplitudes for all input/output channels over a grid.
/// Channel order is output-major: channel(i_y, i_u) = i_y * n_u + i_u.
struct FrfSet {
    Eigen::MatrixXcd channels;  // n_channels x n_freq
    FrequencyGrid grid;
    Eigen::Index n_inputs = 0;
    Eigen::Index n_outputs = 0;

    Eigen::Index n_channels() const { return channels.rows(); }
    static Eigen::Index channel_index(Eigen::Index output, Eigen::Index input,
                                      Eigen::Index n_inputs) {
        return output * n_inputs + input;
    }
};

/// a = [[0, I], [-M^-1 K, -M^-1 V]], b = [0; M^-1 P_u].
/// Throws NumericError when the mass matrix is numerically singular
/// (condition number above 1e14).
StateSpace assemble_state_space(const MechModel& model);

/// H(jw) = C (jwI - A)^-1 B + D per grid frequency, solved by LU.
/// Throws NumericError naming the offending frequency when the resolvent is
/// singular (undamped system evaluated exactly at a pole).
FrfSet evaluate_frf(const StateSpace& ss, const FrequencyGrid& grid);

/// Eigenvalues of a, sorted by ascending |Im|. |Im| approximates the damped
/// resonance frequency of the corresponding mode.
std::vector<std::complex<double>> system_poles(const StateSpace& ss);

}  // namespace frfpce::dynsys

#endif

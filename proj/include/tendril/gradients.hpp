#pragma once

#include <tendril/environment.hpp>
#include <tendril/robot.hpp>

#include <limits>
#include <vector>

namespace tendril {

/// Gradient of the bending energy sum(kappa_i^2): 2 * kappa.
Eigen::VectorXd objective_gradient(const CurvatureVector& kappa);

/// Entrywise derivative of notch_transform with respect to curvature at
/// fixed arc length. Uses a series branch below kKappaEps where the closed
/// form cancels catastrophically.
Mat3 notch_transform_dkappa(double kappa, double arc_len);

/// Position derivatives of every shape point with respect to every notch
/// curvature, accumulated in a single forward pass through the chain.
/// dpoints[p] is 2 x (m_p + m_d): row 0 = dx/dkappa_j, row 1 = dz/dkappa_j.
/// Derivatives vanish for curvatures at or distal to the point's frame.
struct ShapeJacobian {
    std::vector<Eigen::Matrix2Xd> dpoints;
};

/// Forward kinematics that also fills the per-point curvature Jacobians.
RobotShape forward_kinematics_with_jacobian(const RobotParams& params, double q_a,
                                            const CurvatureVector& kappa,
                                            ShapeJacobian& jac);

ShapeJacobian point_jacobians(const RobotParams& params, double q_a,
                              const CurvatureVector& kappa);

/// Gradient of the tendon-consistency constraint q_seg - l_ten(kappa) over
/// kappa, i.e. minus the tendon-length gradient: for each notch chord
/// v_i = xi_end - xi_base, the contribution is -v_hat_i^T (dxi_end - dxi_base).
/// Chords shorter than 1e-12 are skipped and counted in degenerate_chords.
Eigen::RowVectorXd tendon_constraint_gradient(const RobotParams& params,
                                              const RobotShape& shape,
                                              const ShapeJacobian& jac, Segment seg,
                                              int* degenerate_chords = nullptr);

/// One linearized clearance constraint g = ||p - w|| - gamma1 >= 0 between a
/// shape point and an active environment point, with gradient row
/// d_hat^T dp/dkappa (the environment point is fixed for the linearization).
struct ClearanceRow {
    int point = 0;           // shape point index
    int env_point = 0;       // environment point index
    double value = 0.0;      // distance - gamma1
    Eigen::RowVectorXd grad; // 1 x (m_p + m_d)
    bool degenerate = false; // point coincides with the environment point
};

/// Builds clearance rows for every shape point whose nearest-neighbor
/// distance is at most thin_radius. Each such point is constrained against
/// its active environment points: all within nn_dist + active_cushion (at
/// most max_active of them, nearest first), which keeps the linearization
/// stable across nearest-neighbor switches. Coincident pairs get a zeroed
/// gradient row flagged degenerate.
std::vector<ClearanceRow> clearance_constraints(
    const RobotShape& shape, const ShapeJacobian& jac, const Environment& env,
    double gamma1, double thin_radius = std::numeric_limits<double>::infinity(),
    double active_cushion = 0.75, int max_active = 8);

} // namespace tendril

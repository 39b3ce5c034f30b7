#pragma once

#include <tendril/environment.hpp>
#include <tendril/gradients.hpp>
#include <tendril/robot.hpp>

namespace tendril {

struct MotionModelConfig {
    double gamma1 = 0.05;     // minimum environment clearance (mm)
    double kappa_max = 0.6;   // per-notch curvature bound (1/mm)
    int max_iters = 60;       // solver iteration cap
    double tol_eq = 1e-3;     // tendon/clearance feasibility tolerance (mm)
    double tol_obj = 1e-6;    // stationarity tolerance on the curvature step
    double step_max = 0.05;   // per-iteration trust region (1/mm)
    double thin_radius = 5.0; // points beyond this get no clearance row (mm)
};

struct MotionModelResult {
    CurvatureVector kappa;
    RobotShape shape;
    bool converged = false;
    int iterations = 0;
    double max_eq_violation = 0.0; // max |l_ten - q| over both segments (mm)
    double min_clearance = 0.0;    // min over all shape points (mm)
    double objective = 0.0;        // sum kappa^2
    int degenerate_rows = 0;
};

/// Contact-aware motion model: finds the curvature vector minimizing the
/// bending energy sum(kappa^2) subject to environment clearance
/// dist(R, env) >= gamma1 and tendon consistency l_ten = q for both
/// segments, warm-started from kappa_seed.
///
/// Each iteration linearizes the constraints with the analytic point
/// Jacobians (the nearest environment point is held fixed per iteration)
/// and solves the resulting least-distance program with an active-set
/// method; the step is trust-region limited and curvatures are projected
/// back into [-kappa_max, kappa_max]. Non-convergence within max_iters
/// (including geometrically infeasible tendon commands) is reported via
/// converged = false.
///
/// Deterministic: identical inputs give bitwise-identical results. Safe to
/// call concurrently on distinct inputs.
MotionModelResult solve_motion_model(const RobotParams& params, const JointConfig& q,
                                     const CurvatureVector& kappa_seed,
                                     const Environment& env,
                                     const MotionModelConfig& cfg);

} // namespace tendril

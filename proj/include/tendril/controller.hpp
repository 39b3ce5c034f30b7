#pragma once

#include <tendril/motion_model.hpp>
#include <tendril/planner.hpp>
#include <tendril/workspace.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tendril {

struct ControllerConfig {
    double beta = 0.5; // feedforward blend in [0, 1]
    Vec3 kp{0.5, 0.5, 0.3};
    Vec3 kd{0.05, 0.05, 0.02};
    double lambda = 0.1;  // pseudo-inverse damping
    double eps_pos = 1.0; // waypoint-advance position threshold (mm)
    double eps_phi = 0.1; // waypoint-advance angle threshold (rad)
    int ticks_per_waypoint = 60;
    double u_clip = 2.0; // per-step actuation norm limit (mm)
    bool feedback_enabled = true;

    void validate() const; // throws std::invalid_argument
};

/// Simulated-plant mismatch: rigid misregistration of the environment,
/// multiplicative per-axis actuation gain error, and Gaussian tip-pose
/// sensor noise. Deterministic given the seed.
struct PlantConfig {
    Vec2 env_offset{0.0, 0.0};
    double env_rotation = 0.0; // rad, about the environment bbox center
    Vec3 gain{1.0, 1.0, 1.0};
    double noise_pos = 0.0; // mm std dev on x, z
    double noise_phi = 0.0; // rad std dev on phi
    std::uint64_t seed = 0;
};

/// The nominal environment transformed by the plant misregistration.
Environment make_offset_environment(const Environment& nominal, const PlantConfig& cfg);

/// Deterministic standard-normal generator (Box-Muller over mt19937_64).
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : state_(seed) {}
    double normal();

private:
    std::uint64_t next_u64();
    std::uint64_t state_;
};

/// Ground-truth robot standing in for hardware: applies gain-perturbed
/// increments, resolves the contact-aware motion model against the offset
/// environment, and reports a noisy tip pose.
class Plant {
public:
    /// Throws std::runtime_error if the initial configuration does not
    /// converge against the plant environment.
    Plant(const RobotParams& params, const Environment& nominal_env,
          const JointConfig& q0, const CurvatureVector& kappa0,
          const MotionModelConfig& mcfg, const PlantConfig& pcfg);

    /// Applies one control increment. Returns false on motion-model
    /// divergence (the run must abort).
    bool step(const ControlInput& u);

    /// Current tip pose with sensor noise applied (advances the RNG).
    TipPose measure();

    const RobotShape& true_shape() const { return shape_; }
    const JointConfig& q_true() const { return q_; }
    const Environment& true_env() const { return env_; }

    /// Finite-perturbation tip Jacobian at the current true state, resolved
    /// through the plant's own motion model.
    Mat3 true_jacobian(const Vec3& dq_step);

private:
    const RobotParams& params_;
    Environment env_;
    MotionModelConfig mcfg_;
    PlantConfig pcfg_;
    JointConfig q_;
    CurvatureVector kappa_;
    RobotShape shape_;
    GaussianRng rng_;
};

struct TrackingRun {
    bool success = false;
    std::string failure_reason;

    std::vector<TipPose> measured;       // per tick
    std::vector<JointConfig> commanded;  // per tick
    std::vector<ControlInput> inputs;    // per tick (except the last state)
    std::vector<double> path_err;        // e_t per tick
    std::vector<int> waypoint;           // active plan index per tick

    double mean_err = 0.0;
    double max_path_dist = 0.0;
    int ticks = 0;
    int body_contact_steps = 0;
    bool tip_contact = false;        // any distal-tip contact on the true plant
    bool unsafe_tip_contact = false; // tip contact outside partition 1
};

/// Damped-least-squares feedback: u = J^T (J J^T + lambda^2 I)^{-1}
/// (Kp e + Kd e_dot), clipped to u_clip in norm.
ControlInput feedback_control(const Vec3& err, const Vec3& err_dot, const Mat3& J,
                              const ControllerConfig& cfg);

/// Where the tracking loop takes its feedback Jacobian from.
enum class JacobianSource {
    kPlan,      // precomputed contact-aware Jacobians carried by the plan
    kPlantTrue, // idealized per-tick Jacobian from the plant model
};

/// Context for contact accounting during tracking: partitions of the nominal
/// environment plus the contact thresholds.
struct TrackingContext {
    const TaskGrid* grid = nullptr;
    const PartitionField* parts = nullptr;
    double gamma_contact = 0.3;
    Vec3 u_step{1.0, 0.1, 0.1}; // perturbation steps for kPlantTrue
};

/// Closed-loop trajectory tracking of the planned tip-pose sequence. Each
/// tick blends the plan's feedforward input with damped pseudo-inverse
/// feedback, advances the waypoint index when both error thresholds are met,
/// and terminates with success once the measured pose enters the goal set.
/// Exceeding the per-waypoint tick cap or plant divergence fails the run.
TrackingRun track_trajectory(const PlanResult& plan, Plant& plant,
                             const ControllerConfig& cfg, const GoalSet& goal,
                             const TrackingContext& ctx,
                             JacobianSource jac_source = JacobianSource::kPlan);

/// Mean over ticks of the distance from each measured position to the
/// nearest planned waypoint (positions only).
double mean_tracking_error(const std::vector<TipPose>& measured,
                           const std::vector<TipPose>& plan_poses);

} // namespace tendril

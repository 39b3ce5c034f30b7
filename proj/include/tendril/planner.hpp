#pragma once

#include <tendril/environment.hpp>
#include <tendril/motion_model.hpp>
#include <tendril/robot.hpp>
#include <tendril/workspace.hpp>

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace tendril {

struct PlannerConfig {
    Vec3 u_step{1.0, 0.1, 0.1}; // lattice increments per axis (mm)
    Vec3 q_min{0.0, 0.0, 0.0};
    Vec3 q_max{0.0, 0.0, 0.0};
    double epsilon = 2.0; // heuristic inflation >= 1

    // action cost weights: free-space tip displacement per unit actuation
    double c_a = 1.1;
    double c_p = 60.0;
    double c_d = 10.0;

    // contact stage costs, C_d > C_p > C_body
    double C_d = 1e4;
    double C_p = 1e3;
    double C_body = 10.0;
    double gamma_ecs = 0.5;     // tip / segment-end contact threshold (mm)
    double gamma_contact = 0.3; // body contact band (mm)

    long expansion_cap = 200000;
    bool use_partition_actions = true; // partition-dependent action sets
    bool use_cache = true;
    bool allow_reexpansion = false;

    void validate() const; // throws std::invalid_argument
};

/// Per-state contact annotation derived from a converged motion-model shape.
struct StepAnnotation {
    bool tip_contact = false;  // dist(distal tip slice, env) <= gamma_ecs
    bool ecs_contact = false;  // dist(proximal end slice, env) <= gamma_ecs
    bool body_contact = false; // n_contact > 0
    int n_contact = 0;         // shape points within gamma_contact of env
};

struct PlanResult {
    bool success = false;
    std::string failure_reason;

    std::vector<JointConfig> q_seq;          // tau + 1
    std::vector<ControlInput> u_seq;         // tau
    std::vector<TipPose> p_seq;              // tau + 1
    std::vector<CurvatureVector> kappa_seq;  // tau + 1
    std::vector<Mat3> jacobian_seq;          // tau, filled by compute_plan_jacobians
    std::vector<StepAnnotation> contacts;    // tau + 1
    std::vector<int> ell_seq;                // tau + 1
    std::vector<std::uint8_t> jacobian_flags; // per step: bit 0-2 backward diff, 3-5 zeroed

    double total_cost = 0.0;
    long expansions = 0;
    long solver_calls = 0;
    long cache_hits = 0;
    double wall_time_s = 0.0;

    std::size_t tau() const { return u_seq.size(); }

    // search-internal node ids per plan step; lets the Jacobian pass share
    // the motion-model cache with the search
    std::vector<int> node_ids;
};

/// Weighted contribution of a control increment: sum over moved axes of the
/// per-axis weight times the absolute increment.
double action_cost(const ControlInput& u, const PlannerConfig& cfg);

StepAnnotation annotate_contact(const RobotShape& shape, const Environment& env,
                                const PlannerConfig& cfg);

/// Contact stage cost of a robot state: C_d / C_p indicators on tip and
/// proximal-end proximity plus a normalized body-contact term. All penalties
/// vanish in partition 1 when the tip orientation is within the goal band.
double contact_cost(const RobotShape& shape, const Environment& env, int ell,
                    double tip_phi, const GoalSet& goal, const PlannerConfig& cfg);

/// Partition-dependent action set: lattice steps in the 26-neighbor stencil
/// available at partition ell (full stencil when partition actions are off).
std::vector<Eigen::Vector3i> successor_steps(int ell, const PlannerConfig& cfg);

/// Joint-space lattice derived from the planner bounds and increments.
struct Lattice {
    Vec3 q_min = Vec3::Zero();
    Vec3 u_step = Vec3::Ones();
    Eigen::Vector3i count = Eigen::Vector3i::Zero();

    static Lattice from_config(const PlannerConfig& cfg);
    JointConfig q_at(const Eigen::Vector3i& idx) const;
    bool in_bounds(const Eigen::Vector3i& idx) const;
    /// Snaps q to the nearest lattice vertex; false if off by > 1e-6 or out
    /// of bounds.
    bool snap(const JointConfig& q, Eigen::Vector3i& idx) const;
    std::int64_t key(const Eigen::Vector3i& idx) const;
};

/// Search-based contact-aware planner over the joint lattice. One instance
/// owns the motion-model memoization cache, so a plan and its subsequent
/// Jacobian pass share solves. The search loop is sequential and
/// deterministic: ties in the open list break on (f, -g, lexicographic q).
class Planner {
public:
    Planner(const RobotParams& params, const Environment& env, const GoalSet& goal,
            const TaskGrid& grid, const PartitionField& parts,
            const HeuristicField& heur, const PlannerConfig& cfg,
            const MotionModelConfig& mcfg);

    /// Runs weighted A* from a lattice-aligned start. Non-converging
    /// successor solves are discarded. Returns a failed result (with reason)
    /// if the start is infeasible, the open list empties, or the expansion
    /// cap is hit.
    PlanResult plan(const JointConfig& start, const CurvatureVector& kappa0);

    /// Fills plan.jacobian_seq with finite-perturbation tip Jacobians: each
    /// joint axis is perturbed by its lattice step and re-solved from the
    /// step's curvature seed. A failed perturbation falls back to the
    /// opposite sign; if both fail the column is zeroed and flagged.
    void compute_plan_jacobians(PlanResult& plan);

    long solver_calls() const { return solver_calls_; }
    long cache_hits() const { return cache_hits_; }

private:
    struct CachedSolve {
        bool converged = false;
        CurvatureVector kappa;
        TipPose tip;
        StepAnnotation ann;
    };

    struct CacheKey {
        std::int64_t qkey;
        int parent;
        bool operator==(const CacheKey&) const = default;
    };
    struct CacheKeyHash {
        std::size_t operator()(const CacheKey& k) const
        {
            return std::hash<std::int64_t>()(k.qkey * 1000003 + k.parent);
        }
    };

    const CachedSolve& solve_cached(const Eigen::Vector3i& idx, int parent,
                                    const CurvatureVector& seed);

    const RobotParams& params_;
    const Environment& env_;
    const GoalSet& goal_;
    const TaskGrid& grid_;
    const PartitionField& parts_;
    const HeuristicField& heur_;
    PlannerConfig cfg_;
    MotionModelConfig mcfg_;
    Lattice lattice_;

    std::vector<Eigen::Vector3i> steps_full_;
    std::vector<Eigen::Vector3i> steps_mid_;
    std::vector<Eigen::Vector3i> steps_restricted_;

    std::unordered_map<CacheKey, CachedSolve, CacheKeyHash> cache_;
    CachedSolve scratch_; // result slot when caching is off
    long solver_calls_ = 0;
    long cache_hits_ = 0;
};

} // namespace tendril

#pragma once

#include <tendril/controller.hpp>
#include <tendril/io.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tendril {

enum class AblationSuite { kEcs, kBody, kOpenLoop, kCenterline };

/// Throws ConfigError on an unknown suite name
/// (known: ecs, body, openloop, centerline).
AblationSuite parse_suite(const std::string& name);

struct AblationArm {
    std::string label;
    PlanResult plan;
    std::vector<TrackingRun> runs; // one per seed (may be empty)
    double max_mu1 = 0.0;          // max clipped mu1 over the plan Jacobians
};

struct AblationReport {
    std::string suite;
    std::string scenario;
    std::vector<AblationArm> arms;
    bool direction_ok = false; // the expected paired effect held
    std::string table;         // tab-delimited report body
};

/// Runs one paired ablation study on a scenario:
///  - ecs:        plan with vs without tip/segment-end contact penalties,
///                compared on max manipulability along the plan
///  - body:       plan with vs without the body contact penalty, each
///                tracked on the plant, compared on body-contact steps
///  - openloop:   one plan tracked open loop vs closed loop per seed
///  - centerline: a task-space centerline waypoint list fed to the same
///                controller vs the contact-aware plan
/// Artifacts (plans, runs, mu1 profiles, report.txt) are written into
/// out_dir when it is nonempty. Tracking runs for independent seeds execute
/// on up to worker_count() threads; results merge in seed order.
AblationReport run_ablation(AblationSuite suite, const Scenario& scenario,
                            const WorkspaceFields& fields,
                            std::span<const std::uint64_t> seeds,
                            const std::filesystem::path& out_dir = {});

/// Kinematics-agnostic waypoint list: a steepest-descent walk of the
/// heuristic field from the start tip to the goal, poses oriented along the
/// walk direction. u and Jacobian entries are placeholders; callers track it
/// with per-tick plant Jacobians.
PlanResult centerline_pseudo_plan(const Scenario& scenario, const WorkspaceFields& fields,
                                  const TipPose& start_tip, double waypoint_spacing = 2.0);

} // namespace tendril

#include <tendril/ablation.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tendril {

AblationSuite parse_suite(const std::string& name)
{
    if (name == "ecs") {
        return AblationSuite::kEcs;
    }
    if (name == "body") {
        return AblationSuite::kBody;
    }
    if (name == "openloop") {
        return AblationSuite::kOpenLoop;
    }
    if (name == "centerline") {
        return AblationSuite::kCenterline;
    }
    throw ConfigError("suite", "unknown suite '" + name +
                                   "' (known: ecs, body, openloop, centerline)");
}

namespace {

PlanResult plan_with_jacobians(const Scenario& s, const WorkspaceFields& f,
                               const PlannerConfig& pcfg)
{
    Planner planner(s.params, s.env, s.goal, f.grid, f.parts, f.heur, pcfg, s.mcfg);
    const CurvatureVector kappa0 = CurvatureVector::Zero(s.params.num_notches());
    PlanResult plan = planner.plan(s.start, kappa0);
    if (plan.success) {
        planner.compute_plan_jacobians(plan);
    }
    return plan;
}

double max_mu1_along(const PlanResult& plan)
{
    double best = 0.0;
    for (const Mat3& J : plan.jacobian_seq) {
        best = std::max(best, manipulability_mu1(J));
    }
    return best;
}

TrackingRun track_with_seed(const Scenario& s, const WorkspaceFields& f,
                            const PlanResult& plan, const ControllerConfig& ccfg,
                            std::uint64_t seed, JacobianSource source)
{
    PlantConfig pc = s.plantcfg;
    pc.seed = seed;
    Plant plant(s.params, s.env, plan.q_seq.front(),
                CurvatureVector::Zero(s.params.num_notches()), s.mcfg, pc);
    TrackingContext ctx{&f.grid, &f.parts, s.pcfg.gamma_contact, s.pcfg.u_step};
    return track_trajectory(plan, plant, ccfg, s.goal, ctx, source);
}

/// Runs fn(i) for i in [0, n) on up to worker_count() threads.
void parallel_for(int n, const std::function<void(int)>& fn)
{
    const int workers = std::min(n, worker_count());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) {
        t.join();
    }
}

void write_mu1_profile(const std::filesystem::path& path, const PlanResult& plan)
{
    std::ofstream out(path);
    out << "mu1 v1 steps=" << plan.jacobian_seq.size() << "\n";
    for (std::size_t k = 0; k < plan.jacobian_seq.size(); ++k) {
        out << k << " " << format_fixed(manipulability_mu1(plan.jacobian_seq[k])) << "\n";
    }
}

} // namespace

PlanResult centerline_pseudo_plan(const Scenario& scenario, const WorkspaceFields& fields,
                                  const TipPose& start_tip, double waypoint_spacing)
{
    const TaskGrid& grid = fields.grid;
    const HeuristicField& heur = fields.heur;

    int ix, iz;
    grid.cell_of(Vec2(start_tip.x, start_tip.z), ix, iz);
    if (!grid.in_bounds(ix, iz) || !std::isfinite(heur.at(ix, iz))) {
        throw std::runtime_error("centerline_pseudo_plan: start tip cannot reach the goal");
    }

    // steepest descent over the heuristic field down to a goal cell
    constexpr int kDx[4] = {0, 0, -1, 1};
    constexpr int kDz[4] = {1, -1, 0, 0};
    std::vector<Vec2> cells{grid.center(ix, iz)};
    while (heur.at(ix, iz) > 0.0) {
        int best_a = -1;
        double best_h = heur.at(ix, iz);
        for (int a = 0; a < 4; ++a) {
            const int nx = ix + kDx[a];
            const int nz = iz + kDz[a];
            if (grid.is_free(nx, nz) && heur.at(nx, nz) < best_h) {
                best_h = heur.at(nx, nz);
                best_a = a;
            }
        }
        if (best_a < 0) {
            throw std::runtime_error("centerline_pseudo_plan: descent stalled");
        }
        ix += kDx[best_a];
        iz += kDz[best_a];
        cells.push_back(grid.center(ix, iz));
    }

    const int stride =
        std::max(1, static_cast<int>(std::round(waypoint_spacing / grid.cell_size)));
    std::vector<Vec2> waypoints;
    for (std::size_t i = 0; i < cells.size(); i += stride) {
        waypoints.push_back(cells[i]);
    }
    if (waypoints.back() != cells.back()) {
        waypoints.push_back(cells.back());
    }

    PlanResult plan;
    plan.success = true;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        TipPose p;
        p.x = waypoints[i].x();
        p.z = waypoints[i].y();
        if (i + 1 < waypoints.size()) {
            const Vec2 dir = waypoints[i + 1] - waypoints[i];
            p.phi = std::atan2(dir.x(), dir.y());
        } else {
            p.phi = 0.0;
        }
        plan.p_seq.push_back(p);
        plan.q_seq.push_back(scenario.start);
        plan.contacts.push_back({});
        plan.ell_seq.push_back(0);
        if (i + 1 < waypoints.size()) {
            plan.u_seq.push_back(ControlInput::zero());
            plan.jacobian_seq.push_back(Mat3::Identity());
        }
    }
    return plan;
}

AblationReport run_ablation(AblationSuite suite, const Scenario& scenario,
                            const WorkspaceFields& fields,
                            std::span<const std::uint64_t> seeds,
                            const std::filesystem::path& out_dir)
{
    AblationReport report;
    report.scenario = scenario.name;
    const bool write = !out_dir.empty();
    if (write) {
        std::filesystem::create_directories(out_dir);
    }
    std::ostringstream table;

    switch (suite) {
    case AblationSuite::kEcs: {
        report.suite = "ecs";
        PlannerConfig off = scenario.pcfg;
        off.C_d = 0.0;
        off.C_p = 0.0;

        AblationArm on;
        on.label = "ecs_penalty_on";
        on.plan = plan_with_jacobians(scenario, fields, scenario.pcfg);
        AblationArm off_arm;
        off_arm.label = "ecs_penalty_off";
        off_arm.plan = plan_with_jacobians(scenario, fields, off);
        on.max_mu1 = max_mu1_along(on.plan);
        off_arm.max_mu1 = max_mu1_along(off_arm.plan);

        table << "arm\texpands\ttime_s\tplan_cost\tmax_mu1\n";
        for (const AblationArm* arm : {&on, &off_arm}) {
            table << arm->label << "\t" << arm->plan.expansions << "\t"
                  << format_fixed(arm->plan.wall_time_s) << "\t"
                  << format_fixed(arm->plan.total_cost) << "\t"
                  << format_fixed(arm->max_mu1) << "\n";
        }
        report.direction_ok = on.plan.success && off_arm.plan.success &&
                              off_arm.max_mu1 > on.max_mu1;
        if (write) {
            write_plan_file(out_dir / "plan_ecs_on.txt", on.plan);
            write_plan_file(out_dir / "plan_ecs_off.txt", off_arm.plan);
            write_mu1_profile(out_dir / "mu1_ecs_on.txt", on.plan);
            write_mu1_profile(out_dir / "mu1_ecs_off.txt", off_arm.plan);
        }
        report.arms.push_back(std::move(on));
        report.arms.push_back(std::move(off_arm));
        break;
    }

    case AblationSuite::kBody: {
        report.suite = "body";
        PlannerConfig off = scenario.pcfg;
        off.C_body = 0.0;

        AblationArm on;
        on.label = "body_penalty_on";
        on.plan = plan_with_jacobians(scenario, fields, scenario.pcfg);
        AblationArm off_arm;
        off_arm.label = "body_penalty_off";
        off_arm.plan = plan_with_jacobians(scenario, fields, off);

        table << "arm\tseed\tbody_contact_steps\tcompletion_ticks\tsuccess\tmean_err\n";
        for (AblationArm* arm : {&on, &off_arm}) {
            if (!arm->plan.success) {
                continue;
            }
            arm->runs.resize(seeds.size());
            parallel_for(static_cast<int>(seeds.size()), [&](int i) {
                arm->runs[i] = track_with_seed(scenario, fields, arm->plan, scenario.ccfg,
                                               seeds[i], JacobianSource::kPlan);
            });
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                const TrackingRun& r = arm->runs[i];
                table << arm->label << "\t" << seeds[i] << "\t" << r.body_contact_steps
                      << "\t" << r.ticks << "\t" << (r.success ? 1 : 0) << "\t"
                      << format_fixed(r.mean_err) << "\n";
            }
        }

        auto mean_body = [](const AblationArm& arm) {
            if (arm.runs.empty()) {
                return std::numeric_limits<double>::infinity();
            }
            double sum = 0.0;
            for (const TrackingRun& r : arm.runs) {
                sum += r.body_contact_steps;
            }
            return sum / static_cast<double>(arm.runs.size());
        };
        report.direction_ok = on.plan.success && off_arm.plan.success &&
                              mean_body(on) < mean_body(off_arm);
        if (write) {
            write_plan_file(out_dir / "plan_body_on.txt", on.plan);
            write_plan_file(out_dir / "plan_body_off.txt", off_arm.plan);
            for (AblationArm* arm : {&on, &off_arm}) {
                for (std::size_t i = 0; i < arm->runs.size(); ++i) {
                    write_run_file(out_dir / ("run_" + arm->label + "_seed" +
                                              std::to_string(seeds[i]) + ".txt"),
                                   arm->runs[i]);
                }
            }
        }
        report.arms.push_back(std::move(on));
        report.arms.push_back(std::move(off_arm));
        break;
    }

    case AblationSuite::kOpenLoop: {
        report.suite = "openloop";
        AblationArm closed;
        closed.label = "closed_loop";
        closed.plan = plan_with_jacobians(scenario, fields, scenario.pcfg);
        AblationArm open;
        open.label = "open_loop";
        open.plan = closed.plan;

        if (closed.plan.success) {
            ControllerConfig open_cfg = scenario.ccfg;
            open_cfg.beta = 1.0;
            open_cfg.feedback_enabled = false;

            closed.runs.resize(seeds.size());
            open.runs.resize(seeds.size());
            parallel_for(static_cast<int>(seeds.size()), [&](int i) {
                closed.runs[i] = track_with_seed(scenario, fields, closed.plan,
                                                 scenario.ccfg, seeds[i], JacobianSource::kPlan);
                open.runs[i] = track_with_seed(scenario, fields, open.plan, open_cfg,
                                               seeds[i], JacobianSource::kPlan);
            });
        }

        table << "arm\tseed\tsuccess\ttip_contact\tmax_path_dist\tmean_err\tticks\n";
        bool ok = closed.plan.success && !seeds.empty();
        for (std::size_t i = 0; i < seeds.size() && closed.plan.success; ++i) {
            const TrackingRun& c = closed.runs[i];
            const TrackingRun& o = open.runs[i];
            for (const auto& [arm, r] : {std::pair{&open, &o}, std::pair{&closed, &c}}) {
                table << arm->label << "\t" << seeds[i] << "\t" << (r->success ? 1 : 0)
                      << "\t" << (r->tip_contact ? 1 : 0) << "\t"
                      << format_fixed(r->max_path_dist) << "\t" << format_fixed(r->mean_err)
                      << "\t" << r->ticks << "\n";
            }
            const bool open_bad = !o.success || o.tip_contact;
            const bool closed_good =
                c.success && c.max_path_dist < scenario.pcfg.gamma_ecs;
            ok = ok && open_bad && closed_good;
            if (write) {
                write_run_file(out_dir / ("run_open_seed" + std::to_string(seeds[i]) + ".txt"), o);
                write_run_file(out_dir / ("run_closed_seed" + std::to_string(seeds[i]) + ".txt"), c);
            }
        }
        report.direction_ok = ok;
        if (write && closed.plan.success) {
            write_plan_file(out_dir / "plan.txt", closed.plan);
        }
        report.arms.push_back(std::move(open));
        report.arms.push_back(std::move(closed));
        break;
    }

    case AblationSuite::kCenterline: {
        report.suite = "centerline";
        AblationArm aware;
        aware.label = "contact_aware";
        aware.plan = plan_with_jacobians(scenario, fields, scenario.pcfg);
        AblationArm center;
        center.label = "centerline";

        const std::uint64_t seed = seeds.empty() ? 0 : seeds.front();
        bool centerline_failed = false;
        if (aware.plan.success) {
            aware.runs.push_back(track_with_seed(scenario, fields, aware.plan, scenario.ccfg,
                                                 seed, JacobianSource::kPlan));

            center.plan = centerline_pseudo_plan(scenario, fields, aware.plan.p_seq.front());
            ControllerConfig fb_only = scenario.ccfg;
            fb_only.beta = 0.0; // no feedforward exists for the centerline
            center.runs.push_back(track_with_seed(scenario, fields, center.plan, fb_only,
                                                  seed, JacobianSource::kPlantTrue));
            centerline_failed = !center.runs.front().success;
        }

        table << "arm\tseed\tsuccess\ttip_contact\tmean_err\tticks\n";
        for (const AblationArm* arm : {&center, &aware}) {
            for (const TrackingRun& r : arm->runs) {
                table << arm->label << "\t" << seed << "\t" << (r.success ? 1 : 0) << "\t"
                      << (r.tip_contact ? 1 : 0) << "\t" << format_fixed(r.mean_err) << "\t"
                      << r.ticks << "\n";
            }
        }
        report.direction_ok = aware.plan.success && !aware.runs.empty() &&
                              aware.runs.front().success && centerline_failed;
        if (write && aware.plan.success) {
            write_plan_file(out_dir / "plan_contact_aware.txt", aware.plan);
            write_run_file(out_dir / "run_contact_aware.txt", aware.runs.front());
            if (!center.runs.empty()) {
                write_run_file(out_dir / "run_centerline.txt", center.runs.front());
            }
        }
        report.arms.push_back(std::move(center));
        report.arms.push_back(std::move(aware));
        break;
    }
    }

    report.table = table.str();
    if (write) {
        std::ofstream out(out_dir / "report.txt");
        out << "suite=" << report.suite << "\tscenario=" << report.scenario << "\n";
        out << report.table;
        out << "direction_ok=" << (report.direction_ok ? 1 : 0) << "\n";
    }
    return report;
}

} // namespace tendril

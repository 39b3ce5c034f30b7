#include <tendril/ablation.hpp>
#include <tendril/controller.hpp>
#include <tendril/io.hpp>
#include <tendril/planner.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

namespace fs = std::filesystem;
using namespace tendril;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailure = 2;

struct CommonOpts {
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
};

Scenario load_with_overrides(const CommonOpts& opts)
{
    Scenario s = load_scenario(opts.scenario_path);
    if (opts.seed) {
        s.plantcfg.seed = *opts.seed;
    }
    return s;
}

int cmd_plan(const CommonOpts& opts, std::optional<double> epsilon, bool no_cache)
{
    Scenario s = load_with_overrides(opts);
    if (epsilon) {
        s.pcfg.epsilon = *epsilon;
    }
    if (no_cache) {
        s.pcfg.use_cache = false;
    }

    const WorkspaceFields fields = build_fields(s);
    fs::create_directories(opts.out_dir);
    write_partition_file(fs::path(opts.out_dir) / "partition.txt", fields.grid, fields.parts);
    write_heuristic_file(fs::path(opts.out_dir) / "heuristic.txt", fields.grid, fields.heur);

    Planner planner(s.params, s.env, s.goal, fields.grid, fields.parts, fields.heur,
                    s.pcfg, s.mcfg);
    PlanResult plan = planner.plan(s.start, CurvatureVector::Zero(s.params.num_notches()));

    // wall time and solver stats live here, not in the plan file, so plan
    // outputs stay byte-reproducible
    {
        std::ofstream stats(fs::path(opts.out_dir) / "plan_stats.txt");
        stats << "success=" << (plan.success ? 1 : 0) << "\n"
              << "expansions=" << plan.expansions << "\n"
              << "solver_calls=" << planner.solver_calls() << "\n"
              << "cache_hits=" << planner.cache_hits() << "\n"
              << "wall_time_s=" << plan.wall_time_s << "\n";
        if (!plan.success) {
            stats << "failure_reason=" << plan.failure_reason << "\n";
        }
    }
    if (!plan.success) {
        std::fprintf(stderr, "plan failed: %s\n", plan.failure_reason.c_str());
        return kExitFailure;
    }

    planner.compute_plan_jacobians(plan);
    write_plan_file(fs::path(opts.out_dir) / "plan.txt", plan);
    std::printf("plan: tau=%zu cost=%s expands=%ld time=%.2fs\n", plan.tau(),
                format_fixed(plan.total_cost).c_str(), plan.expansions, plan.wall_time_s);
    return kExitOk;
}

int cmd_track(const CommonOpts& opts, const std::string& plan_path, bool open_loop)
{
    Scenario s = load_with_overrides(opts);
    PlanResult plan = read_plan_file(plan_path);

    // reject a plan produced for a different robot or scenario: re-derive
    // the first tip pose from this scenario's model
    {
        const MotionModelResult mm =
            solve_motion_model(s.params, plan.q_seq.front(),
                               CurvatureVector::Zero(s.params.num_notches()), s.env, s.mcfg);
        const double dp = std::hypot(mm.shape.tip.x - plan.p_seq.front().x,
                                     mm.shape.tip.z - plan.p_seq.front().z);
        if (!mm.converged || dp > 1e-3) {
            throw ConfigError("plan", "plan does not match the scenario robot/environment");
        }
    }

    if (open_loop) {
        s.ccfg.beta = 1.0;
        s.ccfg.feedback_enabled = false;
    }

    const WorkspaceFields fields = build_fields(s);
    Plant plant(s.params, s.env, plan.q_seq.front(),
                CurvatureVector::Zero(s.params.num_notches()), s.mcfg, s.plantcfg);
    TrackingContext ctx{&fields.grid, &fields.parts, s.pcfg.gamma_contact, s.pcfg.u_step};
    const TrackingRun run = track_trajectory(plan, plant, s.ccfg, s.goal, ctx);

    fs::create_directories(opts.out_dir);
    write_run_file(fs::path(opts.out_dir) / "run.txt", run);
    std::printf("track: success=%d mean_err=%s ticks=%d body_contact_steps=%d\n",
                run.success ? 1 : 0, format_fixed(run.mean_err).c_str(), run.ticks,
                run.body_contact_steps);
    if (!run.success) {
        std::fprintf(stderr, "tracking failed: %s\n", run.failure_reason.c_str());
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_ablate(const CommonOpts& opts, const std::string& suite_name)
{
    Scenario s = load_with_overrides(opts);
    const AblationSuite suite = parse_suite(suite_name);
    const WorkspaceFields fields = build_fields(s);

    const std::uint64_t base = s.plantcfg.seed;
    std::vector<std::uint64_t> seeds;
    const int n_seeds = (suite == AblationSuite::kOpenLoop) ? 5 : 3;
    for (int i = 0; i < n_seeds; ++i) {
        seeds.push_back(base + static_cast<std::uint64_t>(i));
    }

    const AblationReport report = run_ablation(suite, s, fields, seeds, opts.out_dir);
    std::printf("ablate %s on %s: direction_ok=%d\n", report.suite.c_str(),
                report.scenario.c_str(), report.direction_ok ? 1 : 0);
    std::fputs(report.table.c_str(), stdout);
    for (const AblationArm& arm : report.arms) {
        if (!arm.plan.success && !arm.plan.failure_reason.empty()) {
            std::fprintf(stderr, "arm %s: plan failed: %s\n", arm.label.c_str(),
                         arm.plan.failure_reason.c_str());
            return kExitFailure;
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"contact-aware planning and control for a two-segment notched continuum robot"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::optional<double> epsilon;
    bool no_cache = false;
    bool open_loop = false;
    std::string plan_path;
    std::string suite;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", opts.scenario_path, "scenario file")->required();
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--seed", opts.seed, "plant RNG seed override");
    };

    CLI::App* plan = app.add_subcommand("plan", "plan a trajectory and export the fields");
    add_common(plan);
    plan->add_option("--epsilon", epsilon, "heuristic inflation override");
    plan->add_flag("--no-cache", no_cache, "disable motion-model memoization");

    CLI::App* track = app.add_subcommand("track", "track a planned trajectory on the plant");
    add_common(track);
    track->add_option("--plan", plan_path, "plan file")->required();
    track->add_flag("--open-loop", open_loop, "feedforward only (beta = 1, no feedback)");

    CLI::App* ablate = app.add_subcommand("ablate", "run a paired ablation study");
    add_common(ablate);
    ablate->add_option("--suite", suite, "ecs | body | openloop | centerline")->required();

    try {
        app.parse(argc, argv);
        if (plan->parsed()) {
            return cmd_plan(opts, epsilon, no_cache);
        }
        if (track->parsed()) {
            return cmd_track(opts, plan_path, open_loop);
        }
        return cmd_ablate(opts, suite);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}

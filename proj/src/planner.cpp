#include <tendril/planner.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace tendril {

void PlannerConfig::validate() const
{
    if (epsilon < 1.0) {
        throw std::invalid_argument("PlannerConfig: epsilon must be >= 1");
    }
    if (C_d < 0.0 || C_p < 0.0 || C_body < 0.0) {
        throw std::invalid_argument("PlannerConfig: contact costs must be >= 0");
    }
    // strict ordering applies to full configs; ablations may zero terms
    if (C_d > 0.0 && C_p > 0.0 && C_body > 0.0 && !(C_d > C_p && C_p > C_body)) {
        throw std::invalid_argument("PlannerConfig: require C_d > C_p > C_body");
    }
    for (int i = 0; i < 3; ++i) {
        if (u_step[i] <= 0.0) {
            throw std::invalid_argument("PlannerConfig: u_step must be > 0 per axis");
        }
        if (q_max[i] < q_min[i]) {
            throw std::invalid_argument("PlannerConfig: q_max < q_min");
        }
    }
}

double action_cost(const ControlInput& u, const PlannerConfig& cfg)
{
    return cfg.c_a * std::abs(u.dua) + cfg.c_p * std::abs(u.dup) + cfg.c_d * std::abs(u.dud);
}

StepAnnotation annotate_contact(const RobotShape& shape, const Environment& env,
                                const PlannerConfig& cfg)
{
    StepAnnotation ann;
    double dist_d = std::numeric_limits<double>::infinity();
    double dist_p = std::numeric_limits<double>::infinity();
    for (const ShapePoint& sp : shape.points) {
        const double d = env.distance(sp.p);
        if (sp.loc == PointLocation::kDistalTip) {
            dist_d = std::min(dist_d, d);
        } else if (sp.loc == PointLocation::kProximalEnd) {
            dist_p = std::min(dist_p, d);
        }
        if (d <= cfg.gamma_contact) {
            ++ann.n_contact;
        }
    }
    ann.tip_contact = dist_d <= cfg.gamma_ecs;
    ann.ecs_contact = dist_p <= cfg.gamma_ecs;
    ann.body_contact = ann.n_contact > 0;
    return ann;
}

namespace {

double contact_cost_from(const StepAnnotation& ann, std::size_t total_points, int ell,
                         double tip_phi, const GoalSet& goal, const PlannerConfig& cfg)
{
    if (ell == 1 && std::abs(tip_phi) <= goal.phi_max) {
        return 0.0;
    }
    double cost = 0.0;
    if (ann.tip_contact) {
        cost += cfg.C_d;
    }
    if (ann.ecs_contact) {
        cost += cfg.C_p;
    }
    cost += cfg.C_body * static_cast<double>(ann.n_contact) / static_cast<double>(total_points);
    return cost;
}

std::vector<Eigen::Vector3i> build_steps(int level)
{
    // level 0: full 26-neighbor stencil; level 1: single-axis moves plus
    // insertion-distal diagonals; level 2: insertion and distal only
    std::vector<Eigen::Vector3i> steps;
    for (int a = -1; a <= 1; ++a) {
        for (int p = -1; p <= 1; ++p) {
            for (int d = -1; d <= 1; ++d) {
                if (a == 0 && p == 0 && d == 0) {
                    continue;
                }
                const int moved = (a != 0) + (p != 0) + (d != 0);
                bool keep = false;
                if (level == 0) {
                    keep = true;
                } else if (level == 1) {
                    keep = moved == 1 || (p == 0 && a != 0 && d != 0);
                } else {
                    keep = moved == 1 && p == 0 && (a != 0 || d != 0);
                }
                if (keep) {
                    steps.emplace_back(a, p, d);
                }
            }
        }
    }
    return steps;
}

} // namespace

std::vector<Eigen::Vector3i> successor_steps(int ell, const PlannerConfig& cfg)
{
    if (!cfg.use_partition_actions || ell <= 1) {
        return build_steps(0);
    }
    return build_steps(ell == 2 ? 1 : 2);
}

Lattice Lattice::from_config(const PlannerConfig& cfg)
{
    Lattice lat;
    lat.q_min = cfg.q_min;
    lat.u_step = cfg.u_step;
    for (int i = 0; i < 3; ++i) {
        lat.count[i] =
            static_cast<int>(std::floor((cfg.q_max[i] - cfg.q_min[i]) / cfg.u_step[i] + 1e-9)) + 1;
    }
    return lat;
}

JointConfig Lattice::q_at(const Eigen::Vector3i& idx) const
{
    return JointConfig{q_min[0] + idx[0] * u_step[0], q_min[1] + idx[1] * u_step[1],
                       q_min[2] + idx[2] * u_step[2]};
}

bool Lattice::in_bounds(const Eigen::Vector3i& idx) const
{
    for (int i = 0; i < 3; ++i) {
        if (idx[i] < 0 || idx[i] >= count[i]) {
            return false;
        }
    }
    return true;
}

bool Lattice::snap(const JointConfig& q, Eigen::Vector3i& idx) const
{
    const Vec3 v = q.vec();
    for (int i = 0; i < 3; ++i) {
        const double rel = (v[i] - q_min[i]) / u_step[i];
        const double rounded = std::round(rel);
        if (std::abs(rel - rounded) * u_step[i] > 1e-6) {
            return false;
        }
        idx[i] = static_cast<int>(rounded);
    }
    return in_bounds(idx);
}

std::int64_t Lattice::key(const Eigen::Vector3i& idx) const
{
    return (static_cast<std::int64_t>(idx[0]) << 42) |
           (static_cast<std::int64_t>(idx[1]) << 21) | static_cast<std::int64_t>(idx[2]);
}

Planner::Planner(const RobotParams& params, const Environment& env, const GoalSet& goal,
                 const TaskGrid& grid, const PartitionField& parts,
                 const HeuristicField& heur, const PlannerConfig& cfg,
                 const MotionModelConfig& mcfg)
    : params_(params),
      env_(env),
      goal_(goal),
      grid_(grid),
      parts_(parts),
      heur_(heur),
      cfg_(cfg),
      mcfg_(mcfg),
      lattice_(Lattice::from_config(cfg)),
      steps_full_(build_steps(0)),
      steps_mid_(build_steps(1)),
      steps_restricted_(build_steps(2))
{
    cfg_.validate();
    goal_.validate();
}

const Planner::CachedSolve& Planner::solve_cached(const Eigen::Vector3i& idx, int parent,
                                                  const CurvatureVector& seed)
{
    const CacheKey key{lattice_.key(idx), parent};
    if (cfg_.use_cache) {
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++cache_hits_;
            return it->second;
        }
    }

    ++solver_calls_;
    const MotionModelResult mm =
        solve_motion_model(params_, lattice_.q_at(idx), seed, env_, mcfg_);
    CachedSolve solved;
    solved.converged = mm.converged;
    solved.kappa = mm.kappa;
    solved.tip = mm.shape.tip;
    if (mm.converged) {
        solved.ann = annotate_contact(mm.shape, env_, cfg_);
    }

    if (cfg_.use_cache) {
        return cache_.emplace(key, std::move(solved)).first->second;
    }
    scratch_ = std::move(solved);
    return scratch_;
}

double contact_cost(const RobotShape& shape, const Environment& env, int ell,
                    double tip_phi, const GoalSet& goal, const PlannerConfig& cfg)
{
    const StepAnnotation ann = annotate_contact(shape, env, cfg);
    return contact_cost_from(ann, shape.points.size(), ell, tip_phi, goal, cfg);
}

namespace {

struct Node {
    Eigen::Vector3i idx;
    double g = 0.0;
    double h = 0.0;
    int parent = -1;
    int ell = 0;
    TipPose tip;
    CurvatureVector kappa;
    StepAnnotation ann;
    double edge_cost = 0.0;
    bool closed = false;
};

struct HeapEntry {
    double f;
    double g;
    Eigen::Vector3i idx;
    int id;
};

struct HeapCompare {
    // std::priority_queue pops the "largest": order entries so the pop is
    // lowest f, then highest g, then lexicographically smallest q
    bool operator()(const HeapEntry& a, const HeapEntry& b) const
    {
        if (a.f != b.f) {
            return a.f > b.f;
        }
        if (a.g != b.g) {
            return a.g < b.g;
        }
        for (int i = 0; i < 3; ++i) {
            if (a.idx[i] != b.idx[i]) {
                return a.idx[i] > b.idx[i];
            }
        }
        return a.id > b.id;
    }
};

} // namespace

PlanResult Planner::plan(const JointConfig& start, const CurvatureVector& kappa0)
{
    const auto t0 = std::chrono::steady_clock::now();
    PlanResult res;

    Eigen::Vector3i idx0;
    if (!lattice_.snap(start, idx0)) {
        res.failure_reason = "start configuration off the control lattice or out of bounds";
        return res;
    }

    const std::size_t total_points = 3 * static_cast<std::size_t>(frame_count(params_));

    std::vector<Node> nodes;
    std::unordered_map<std::int64_t, int> by_key;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCompare> open;

    auto heuristic_at = [&](const TipPose& tip, double* h) {
        const Vec2 pos(tip.x, tip.z);
        int ix, iz;
        grid_.cell_of(pos, ix, iz);
        if (!grid_.in_bounds(ix, iz)) {
            return false;
        }
        *h = heur_.at(ix, iz);
        return std::isfinite(*h);
    };

    const CachedSolve& s0 = solve_cached(idx0, -1, kappa0);
    if (!s0.converged) {
        res.failure_reason = "start configuration infeasible under the motion model";
        return res;
    }
    double h0 = 0.0;
    if (!heuristic_at(s0.tip, &h0)) {
        res.failure_reason = "start tip outside the grid or unable to reach the goal";
        return res;
    }

    {
        Node n0;
        n0.idx = idx0;
        n0.g = 0.0;
        n0.h = h0;
        n0.parent = -1;
        n0.ell = partition_lookup(grid_, parts_, Vec2(s0.tip.x, s0.tip.z));
        n0.tip = s0.tip;
        n0.kappa = s0.kappa;
        n0.ann = s0.ann;
        nodes.push_back(std::move(n0));
        by_key.emplace(lattice_.key(idx0), 0);
        open.push(HeapEntry{cfg_.epsilon * h0, 0.0, idx0, 0});
    }

    int goal_node = -1;
    while (!open.empty()) {
        const HeapEntry top = open.top();
        open.pop();
        const int v = top.id;
        if (nodes[v].closed || top.g != nodes[v].g) {
            continue; // stale entry
        }
        nodes[v].closed = true;
        ++res.expansions;

        if (goal_.contains(nodes[v].tip)) {
            goal_node = v;
            break;
        }
        if (res.expansions > cfg_.expansion_cap) {
            res.failure_reason = "expansion cap exceeded";
            break;
        }

        const std::vector<Eigen::Vector3i>& steps =
            (!cfg_.use_partition_actions || nodes[v].ell <= 1)
                ? steps_full_
                : (nodes[v].ell == 2 ? steps_mid_ : steps_restricted_);

        for (const Eigen::Vector3i& step : steps) {
            const Eigen::Vector3i cidx = nodes[v].idx + step;
            if (!lattice_.in_bounds(cidx)) {
                continue;
            }
            const std::int64_t ckey = lattice_.key(cidx);
            auto found = by_key.find(ckey);
            if (found != by_key.end() && nodes[found->second].closed &&
                !cfg_.allow_reexpansion) {
                continue;
            }

            const CachedSolve& sol = solve_cached(cidx, v, nodes[v].kappa);
            if (!sol.converged) {
                continue;
            }
            double h = 0.0;
            if (!heuristic_at(sol.tip, &h)) {
                continue;
            }
            const int ell = partition_lookup(grid_, parts_, Vec2(sol.tip.x, sol.tip.z));
            const ControlInput u = lattice_.q_at(cidx) - lattice_.q_at(nodes[v].idx);
            const double edge =
                action_cost(u, cfg_) +
                contact_cost_from(sol.ann, total_points, ell, sol.tip.phi, goal_, cfg_);
            const double g_new = nodes[v].g + edge;

            if (found == by_key.end()) {
                Node child;
                child.idx = cidx;
                child.g = g_new;
                child.h = h;
                child.parent = v;
                child.ell = ell;
                child.tip = sol.tip;
                child.kappa = sol.kappa;
                child.ann = sol.ann;
                child.edge_cost = edge;
                nodes.push_back(std::move(child));
                const int id = static_cast<int>(nodes.size()) - 1;
                by_key.emplace(ckey, id);
                open.push(HeapEntry{g_new + cfg_.epsilon * h, g_new, cidx, id});
            } else {
                Node& child = nodes[found->second];
                if (g_new + 1e-12 < child.g) {
                    child.g = g_new;
                    child.h = h;
                    child.parent = v;
                    child.ell = ell;
                    child.tip = sol.tip;
                    child.kappa = sol.kappa;
                    child.ann = sol.ann;
                    child.edge_cost = edge;
                    child.closed = false;
                    open.push(
                        HeapEntry{g_new + cfg_.epsilon * h, g_new, cidx, found->second});
                }
            }
        }
    }

    res.solver_calls = solver_calls_;
    res.cache_hits = cache_hits_;
    res.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (goal_node < 0) {
        if (res.failure_reason.empty()) {
            res.failure_reason = "open list exhausted without reaching the goal";
        }
        return res;
    }

    std::vector<int> path;
    for (int v = goal_node; v >= 0; v = nodes[v].parent) {
        path.push_back(v);
    }
    std::reverse(path.begin(), path.end());

    res.success = true;
    res.total_cost = nodes[goal_node].g;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Node& n = nodes[path[i]];
        res.q_seq.push_back(lattice_.q_at(n.idx));
        res.p_seq.push_back(n.tip);
        res.kappa_seq.push_back(n.kappa);
        res.contacts.push_back(n.ann);
        res.ell_seq.push_back(n.ell);
        res.node_ids.push_back(path[i]);
        if (i > 0) {
            res.u_seq.push_back(res.q_seq[i] - res.q_seq[i - 1]);
        }
    }
    return res;
}

void Planner::compute_plan_jacobians(PlanResult& plan)
{
    const std::size_t tau = plan.tau();
    plan.jacobian_seq.assign(tau, Mat3::Zero());
    plan.jacobian_flags.assign(tau, 0);

    for (std::size_t k = 0; k < tau; ++k) {
        Eigen::Vector3i idx;
        if (!lattice_.snap(plan.q_seq[k], idx)) {
            plan.jacobian_flags[k] = 0x38;
            continue;
        }
        const int parent = (k < plan.node_ids.size()) ? plan.node_ids[k] : -1;
        Mat3 J = Mat3::Zero();

        for (int axis = 0; axis < 3; ++axis) {
            bool filled = false;
            for (int sign : {+1, -1}) {
                Eigen::Vector3i pidx = idx;
                pidx[axis] += sign;
                if (!lattice_.in_bounds(pidx)) {
                    continue;
                }
                const CachedSolve& sol = solve_cached(pidx, parent, plan.kappa_seq[k]);
                if (!sol.converged) {
                    continue;
                }
                const double dq = sign * cfg_.u_step[axis];
                J(0, axis) = (sol.tip.x - plan.p_seq[k].x) / dq;
                J(1, axis) = (sol.tip.z - plan.p_seq[k].z) / dq;
                J(2, axis) = wrap_angle(sol.tip.phi - plan.p_seq[k].phi) / dq;
                if (sign < 0) {
                    plan.jacobian_flags[k] |= static_cast<std::uint8_t>(1u << axis);
                }
                filled = true;
                break;
            }
            if (!filled) {
                plan.jacobian_flags[k] |= static_cast<std::uint8_t>(1u << (3 + axis));
            }
        }
        plan.jacobian_seq[k] = J;
    }
}

} // namespace tendril

#include <tendril/controller.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace tendril {

void ControllerConfig::validate() const
{
    if (beta < 0.0 || beta > 1.0) {
        throw std::invalid_argument("ControllerConfig: beta must be in [0, 1]");
    }
    if (eps_pos <= 0.0 || eps_phi <= 0.0) {
        throw std::invalid_argument("ControllerConfig: thresholds must be > 0");
    }
    if (kp.minCoeff() < 0.0 || kd.minCoeff() < 0.0 || lambda < 0.0 || u_clip <= 0.0 ||
        ticks_per_waypoint < 1) {
        throw std::invalid_argument("ControllerConfig: invalid gains or limits");
    }
}

Environment make_offset_environment(const Environment& nominal, const PlantConfig& cfg)
{
    const Vec2 center = 0.5 * (nominal.bounds().lo + nominal.bounds().hi);
    const double c = std::cos(cfg.env_rotation);
    const double s = std::sin(cfg.env_rotation);
    std::vector<Vec2> pts;
    pts.reserve(nominal.points().size());
    for (const Vec2& p : nominal.points()) {
        const Vec2 d = p - center;
        pts.emplace_back(center + Vec2(c * d.x() - s * d.y(), s * d.x() + c * d.y()) +
                         cfg.env_offset);
    }
    return Environment(std::move(pts));
}

std::uint64_t GaussianRng::next_u64()
{
    // splitmix64; self-contained so runs reproduce across standard libraries
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double GaussianRng::normal()
{
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    const double u2 =
        (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Plant::Plant(const RobotParams& params, const Environment& nominal_env,
             const JointConfig& q0, const CurvatureVector& kappa0,
             const MotionModelConfig& mcfg, const PlantConfig& pcfg)
    : params_(params),
      env_(make_offset_environment(nominal_env, pcfg)),
      mcfg_(mcfg),
      pcfg_(pcfg),
      q_(q0),
      rng_(pcfg.seed)
{
    MotionModelResult mm = solve_motion_model(params_, q_, kappa0, env_, mcfg_);
    if (!mm.converged) {
        throw std::runtime_error("Plant: initial configuration infeasible");
    }
    kappa_ = mm.kappa;
    shape_ = std::move(mm.shape);
}

bool Plant::step(const ControlInput& u)
{
    q_.qa += pcfg_.gain[0] * u.dua;
    q_.qp += pcfg_.gain[1] * u.dup;
    q_.qd += pcfg_.gain[2] * u.dud;
    MotionModelResult mm = solve_motion_model(params_, q_, kappa_, env_, mcfg_);
    if (!mm.converged) {
        return false;
    }
    kappa_ = mm.kappa;
    shape_ = std::move(mm.shape);
    return true;
}

TipPose Plant::measure()
{
    TipPose p = shape_.tip;
    if (pcfg_.noise_pos > 0.0) {
        p.x += pcfg_.noise_pos * rng_.normal();
        p.z += pcfg_.noise_pos * rng_.normal();
    }
    if (pcfg_.noise_phi > 0.0) {
        p.phi = wrap_angle(p.phi + pcfg_.noise_phi * rng_.normal());
    }
    return p;
}

Mat3 Plant::true_jacobian(const Vec3& dq_step)
{
    Mat3 J = Mat3::Zero();
    for (int axis = 0; axis < 3; ++axis) {
        for (int sign : {+1, -1}) {
            JointConfig qp = q_;
            const double dq = sign * dq_step[axis];
            if (axis == 0) {
                qp.qa += dq;
            } else if (axis == 1) {
                qp.qp += dq;
            } else {
                qp.qd += dq;
            }
            const MotionModelResult mm = solve_motion_model(params_, qp, kappa_, env_, mcfg_);
            if (!mm.converged) {
                continue;
            }
            J(0, axis) = (mm.shape.tip.x - shape_.tip.x) / dq;
            J(1, axis) = (mm.shape.tip.z - shape_.tip.z) / dq;
            J(2, axis) = wrap_angle(mm.shape.tip.phi - shape_.tip.phi) / dq;
            break;
        }
    }
    return J;
}

ControlInput feedback_control(const Vec3& err, const Vec3& err_dot, const Mat3& J,
                              const ControllerConfig& cfg)
{
    const Vec3 v = cfg.kp.asDiagonal() * err + cfg.kd.asDiagonal() * err_dot;
    Mat3 JJt = J * J.transpose();
    JJt.diagonal().array() += cfg.lambda * cfg.lambda;
    Vec3 u = J.transpose() * JJt.ldlt().solve(v);
    const double norm = u.norm();
    if (norm > cfg.u_clip) {
        u *= cfg.u_clip / norm;
    }
    return ControlInput{u[0], u[1], u[2]};
}

double mean_tracking_error(const std::vector<TipPose>& measured,
                           const std::vector<TipPose>& plan_poses)
{
    if (measured.empty() || plan_poses.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const TipPose& m : measured) {
        double best = std::numeric_limits<double>::infinity();
        for (const TipPose& p : plan_poses) {
            best = std::min(best, std::hypot(m.x - p.x, m.z - p.z));
        }
        sum += best;
    }
    return sum / static_cast<double>(measured.size());
}

namespace {

double path_distance(const TipPose& m, const std::vector<TipPose>& plan_poses)
{
    double best = std::numeric_limits<double>::infinity();
    for (const TipPose& p : plan_poses) {
        best = std::min(best, std::hypot(m.x - p.x, m.z - p.z));
    }
    return best;
}

} // namespace

TrackingRun track_trajectory(const PlanResult& plan, Plant& plant,
                             const ControllerConfig& cfg, const GoalSet& goal,
                             const TrackingContext& ctx, JacobianSource jac_source)
{
    cfg.validate();
    if (plan.p_seq.empty()) {
        throw std::invalid_argument("track_trajectory: empty plan");
    }

    TrackingRun run;
    const std::size_t tau = plan.p_seq.size() - 1;

    auto account_contact = [&](const TipPose& true_tip) {
        const RobotShape& shape = plant.true_shape();
        const Environment& env = plant.true_env();
        bool body = false;
        double tip_dist = std::numeric_limits<double>::infinity();
        for (const ShapePoint& sp : shape.points) {
            const double d = env.distance(sp.p);
            if (d <= ctx.gamma_contact) {
                body = true;
                if (sp.loc == PointLocation::kDistalTip) {
                    tip_dist = std::min(tip_dist, d);
                }
            }
        }
        if (body) {
            ++run.body_contact_steps;
        }
        if (tip_dist <= ctx.gamma_contact) {
            run.tip_contact = true;
            int ell = 0;
            if (ctx.grid && ctx.parts) {
                const Vec2 pos(true_tip.x, true_tip.z);
                ell = ctx.grid->contains(pos)
                          ? partition_lookup(*ctx.grid, *ctx.parts, pos)
                          : ctx.parts->sentinel();
            }
            if (ell != 1) {
                run.unsafe_tip_contact = true;
            }
        }
    };

    std::size_t k = 0;
    int ticks_at_waypoint = 0;
    Vec3 prev_err = Vec3::Zero();
    bool have_prev_err = false;

    TipPose meas = plant.measure();
    while (true) {
        run.measured.push_back(meas);
        run.commanded.push_back(plant.q_true());
        run.waypoint.push_back(static_cast<int>(k));
        run.path_err.push_back(path_distance(meas, plan.p_seq));

        if (goal.contains(meas)) {
            run.success = true;
            break;
        }

        Vec3 err(plan.p_seq[k].x - meas.x, plan.p_seq[k].z - meas.z,
                 wrap_angle(plan.p_seq[k].phi - meas.phi));
        if (k < tau && err.head<2>().norm() <= cfg.eps_pos &&
            std::abs(err[2]) <= cfg.eps_phi) {
            ++k;
            ticks_at_waypoint = 0;
            err = Vec3(plan.p_seq[k].x - meas.x, plan.p_seq[k].z - meas.z,
                       wrap_angle(plan.p_seq[k].phi - meas.phi));
        }
        if (++ticks_at_waypoint > cfg.ticks_per_waypoint) {
            run.failure_reason = "tick cap exceeded at waypoint " + std::to_string(k);
            break;
        }

        const Vec3 err_dot = have_prev_err ? Vec3(err - prev_err) : Vec3::Zero();
        prev_err = err;
        have_prev_err = true;

        ControlInput u_fb = ControlInput::zero();
        if (cfg.feedback_enabled) {
            const Mat3 J = (jac_source == JacobianSource::kPlantTrue)
                               ? plant.true_jacobian(ctx.u_step)
                               : plan.jacobian_seq[std::min(k, tau - 1)];
            u_fb = feedback_control(err, err_dot, J, cfg);
        }
        const ControlInput u_ff = (k < tau) ? plan.u_seq[k] : ControlInput::zero();

        Vec3 u = cfg.beta * u_ff.vec() + (1.0 - cfg.beta) * u_fb.vec();
        const double norm = u.norm();
        if (norm > cfg.u_clip) {
            u *= cfg.u_clip / norm;
        }
        const ControlInput cmd{u[0], u[1], u[2]};
        run.inputs.push_back(cmd);

        if (!plant.step(cmd)) {
            run.failure_reason = "plant motion model diverged";
            break;
        }
        meas = plant.measure();
        account_contact(plant.true_shape().tip);
    }

    run.ticks = static_cast<int>(run.measured.size()) - 1;
    run.mean_err = mean_tracking_error(run.measured, plan.p_seq);
    run.max_path_dist = 0.0;
    for (double e : run.path_err) {
        run.max_path_dist = std::max(run.max_path_dist, e);
    }
    if (run.success && run.unsafe_tip_contact) {
        run.success = false;
        run.failure_reason = "tip contact outside the final partition";
    }
    return run;
}

} // namespace tendril

#include <tendril/motion_model.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tendril {

namespace {

// Least-distance program: min ||x||^2 s.t. E x = e, A x >= b, solved with a
// primal add/drop active-set loop. Each working-set solve is the minimum-norm
// solution of the stacked active rows via a (lightly ridged) normal-equation
// factorization.
struct LdpResult {
    Eigen::VectorXd x;
    bool ok = false;
    double eq_residual = 0.0;
};

LdpResult solve_least_distance(const Eigen::MatrixXd& E, const Eigen::VectorXd& e,
                               const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    const int n = static_cast<int>(E.cols());
    const int ne = static_cast<int>(E.rows());
    const int ni = static_cast<int>(A.rows());
    constexpr double kTol = 1e-9;

    std::vector<int> working;
    std::vector<char> in_working(ni, 0);

    LdpResult out;
    out.x = Eigen::VectorXd::Zero(n);

    const int max_inner = 20 + 3 * (ne + ni);
    for (int inner = 0; inner < max_inner; ++inner) {
        const int nw = static_cast<int>(working.size());
        Eigen::MatrixXd C(ne + nw, n);
        Eigen::VectorXd rhs(ne + nw);
        C.topRows(ne) = E;
        rhs.head(ne) = e;
        for (int w = 0; w < nw; ++w) {
            C.row(ne + w) = A.row(working[w]);
            rhs(ne + w) = b(working[w]);
        }

        Eigen::VectorXd x, z;
        if (ne + nw == 0) {
            x = Eigen::VectorXd::Zero(n);
            z = Eigen::VectorXd();
        } else {
            Eigen::MatrixXd G = C * C.transpose();
            const double ridge = 1e-12 * std::max(1.0, G.trace());
            G.diagonal().array() += ridge;
            z = G.ldlt().solve(rhs);
            x = C.transpose() * z;
        }

        // most violated inactive inequality
        int worst = -1;
        double worst_v = -kTol;
        for (int i = 0; i < ni; ++i) {
            if (in_working[i]) {
                continue;
            }
            const double v = A.row(i).dot(x) - b(i);
            if (v < worst_v) {
                worst_v = v;
                worst = i;
            }
        }
        if (worst >= 0) {
            working.push_back(worst);
            in_working[worst] = 1;
            continue;
        }

        // drop a working constraint with a wrong-sign multiplier
        int drop = -1;
        double drop_mu = -kTol;
        for (int w = 0; w < nw; ++w) {
            const double mu = 2.0 * z(ne + w);
            if (mu < drop_mu) {
                drop_mu = mu;
                drop = w;
            }
        }
        if (drop >= 0) {
            in_working[working[drop]] = 0;
            working.erase(working.begin() + drop);
            continue;
        }

        out.x = x;
        out.ok = true;
        out.eq_residual = (ne > 0) ? (E * x - e).cwiseAbs().maxCoeff() : 0.0;
        return out;
    }

    out.ok = false;
    return out;
}

double min_clearance_all(const RobotShape& shape, const Environment& env)
{
    double best = std::numeric_limits<double>::infinity();
    for (const ShapePoint& sp : shape.points) {
        best = std::min(best, env.distance(sp.p));
    }
    return best;
}

// penalty weight tying constraint violations (mm) into the step-acceptance
// merit; large relative to the bending-energy scale
constexpr double kMeritRho = 100.0;

struct BasicEval {
    double hp = 0.0;
    double hd = 0.0;
    double min_clear = 0.0;
    double viol_sum = 0.0; // sum over points of max(0, gamma1 - d)
};

BasicEval evaluate_basic(const RobotParams& params, const JointConfig& q,
                         const CurvatureVector& kappa, const Environment& env,
                         double gamma1)
{
    const RobotShape shape = forward_kinematics(params, q.qa, kappa);
    BasicEval ev;
    ev.hp = tendon_length(params, shape, Segment::kProximal) - q.qp;
    ev.hd = tendon_length(params, shape, Segment::kDistal) - q.qd;
    ev.min_clear = std::numeric_limits<double>::infinity();
    for (const ShapePoint& sp : shape.points) {
        const double d = env.distance(sp.p);
        ev.min_clear = std::min(ev.min_clear, d);
        ev.viol_sum += std::max(0.0, gamma1 - d);
    }
    return ev;
}

double merit_of(const CurvatureVector& kappa, const BasicEval& ev)
{
    return kappa.squaredNorm() +
           kMeritRho * (std::abs(ev.hp) + std::abs(ev.hd) + ev.viol_sum);
}

} // namespace

MotionModelResult solve_motion_model(const RobotParams& params, const JointConfig& q,
                                     const CurvatureVector& kappa_seed,
                                     const Environment& env, const MotionModelConfig& cfg)
{
    params.validate();
    if (kappa_seed.size() != params.num_notches()) {
        throw std::invalid_argument("solve_motion_model: seed length != m_p + m_d");
    }
    if (cfg.max_iters < 1 || cfg.gamma1 < 0.0) {
        throw std::invalid_argument("solve_motion_model: invalid config");
    }

    const int n = params.num_notches();
    CurvatureVector kappa =
        kappa_seed.cwiseMax(-cfg.kappa_max).cwiseMin(cfg.kappa_max);

    MotionModelResult res;
    res.kappa = kappa;

    ShapeJacobian jac;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        res.iterations = iter;
        RobotShape shape = forward_kinematics_with_jacobian(params, q.qa, kappa, jac);

        const double hp = tendon_length(params, shape, Segment::kProximal) - q.qp;
        const double hd = tendon_length(params, shape, Segment::kDistal) - q.qd;
        BasicEval cur;
        cur.hp = hp;
        cur.hd = hd;
        cur.min_clear = std::numeric_limits<double>::infinity();
        for (const ShapePoint& sp : shape.points) {
            const double d = env.distance(sp.p);
            cur.min_clear = std::min(cur.min_clear, d);
            cur.viol_sum += std::max(0.0, cfg.gamma1 - d);
        }
        const double min_clear = cur.min_clear;
        const double eq_violation = std::max(std::abs(hp), std::abs(hd));
        const bool feasible =
            eq_violation <= cfg.tol_eq && min_clear >= cfg.gamma1 - cfg.tol_eq;

        // equality rows: l_ten(kappa + d) - q ~ h + dl^T d = 0
        Eigen::MatrixXd E(2, n);
        E.row(0) = -tendon_constraint_gradient(params, shape, jac, Segment::kProximal);
        E.row(1) = -tendon_constraint_gradient(params, shape, jac, Segment::kDistal);
        Eigen::VectorXd e(2);
        e(0) = E.row(0).dot(kappa) - hp;
        e(1) = E.row(1).dot(kappa) - hd;

        // clearance rows near the environment, nearest point fixed this iteration
        const std::vector<ClearanceRow> rows =
            clearance_constraints(shape, jac, env, cfg.gamma1, cfg.thin_radius);
        int active = 0;
        for (const ClearanceRow& r : rows) {
            if (!r.degenerate) {
                ++active;
            } else {
                ++res.degenerate_rows;
            }
        }
        Eigen::MatrixXd A(active, n);
        Eigen::VectorXd b(active);
        int w = 0;
        for (const ClearanceRow& r : rows) {
            if (r.degenerate) {
                continue;
            }
            A.row(w) = r.grad;
            b(w) = r.grad.dot(kappa) - r.value;
            ++w;
        }

        const LdpResult ldp = solve_least_distance(E, e, A, b);
        if (!ldp.ok) {
            res.kappa = kappa;
            res.shape = std::move(shape);
            res.max_eq_violation = eq_violation;
            res.min_clearance = min_clear;
            res.objective = kappa.squaredNorm();
            res.converged = false;
            return res;
        }

        Eigen::VectorXd delta = ldp.x - kappa;
        const double step = delta.cwiseAbs().maxCoeff();
        if (feasible && step <= cfg.tol_obj) {
            res.kappa = kappa;
            res.shape = std::move(shape);
            res.max_eq_violation = eq_violation;
            res.min_clearance = min_clear;
            res.objective = kappa.squaredNorm();
            res.converged = true;
            return res;
        }

        // backtracking step acceptance on an exact-penalty merit; guards
        // against nonlinearity overshoot and active-pair flip-flop cycles
        const double merit_cur = merit_of(kappa, cur);
        double alpha = (step > cfg.step_max) ? cfg.step_max / step : 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 8; ++bt) {
            const CurvatureVector trial = (kappa + alpha * delta)
                                              .cwiseMax(-cfg.kappa_max)
                                              .cwiseMin(cfg.kappa_max);
            const BasicEval ev = evaluate_basic(params, q, trial, env, cfg.gamma1);
            if (merit_of(trial, ev) < merit_cur - 1e-14) {
                kappa = trial;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // no merit descent along the subproblem direction: stationary
            res.kappa = kappa;
            res.shape = std::move(shape);
            res.max_eq_violation = eq_violation;
            res.min_clearance = min_clear;
            res.objective = kappa.squaredNorm();
            res.converged = feasible;
            return res;
        }
    }

    // iteration cap reached: report the final state without claiming success
    res.shape = forward_kinematics_with_jacobian(params, q.qa, kappa, jac);
    res.kappa = kappa;
    const double hp = tendon_length(params, res.shape, Segment::kProximal) - q.qp;
    const double hd = tendon_length(params, res.shape, Segment::kDistal) - q.qd;
    res.max_eq_violation = std::max(std::abs(hp), std::abs(hd));
    res.min_clearance = min_clearance_all(res.shape, env);
    res.objective = kappa.squaredNorm();
    res.converged = false;
    return res;
}

} // namespace tendril

#include <tendril/gradients.hpp>

#include <cmath>
#include <stdexcept>

namespace tendril {

Eigen::VectorXd objective_gradient(const CurvatureVector& kappa)
{
    return 2.0 * kappa;
}

Mat3 notch_transform_dkappa(double kappa, double arc_len)
{
    const double l = arc_len;
    const double theta = kappa * l;
    const double c = std::cos(theta);
    const double s = std::sin(theta);

    double dtx, dtz;
    if (std::abs(kappa) < kKappaEps) {
        // d/dk[(1 - cos)/k] -> l^2/2 - k^2 l^4 / 8
        // d/dk[sin/k]       -> -k l^3 / 3
        dtx = 0.5 * l * l - kappa * kappa * l * l * l * l / 8.0;
        dtz = -kappa * l * l * l / 3.0;
    } else {
        dtx = l * s / kappa - (1.0 - c) / (kappa * kappa);
        dtz = l * c / kappa - s / (kappa * kappa);
    }

    Mat3 D;
    D << -l * s, l * c, dtx,
         -l * c, -l * s, dtz,
         0.0, 0.0, 0.0;
    return D;
}

namespace {

struct ChainState {
    Mat3 T = Mat3::Identity();
    std::vector<Mat3> D; // D[j] = d(T)/d(kappa_j) for notches applied so far

    void append_fixed(const Mat3& M)
    {
        for (Mat3& d : D) {
            d = d * M;
        }
        T = T * M;
    }

    void append_notch(double kappa, double arc_len)
    {
        const Mat3 M = notch_transform(kappa, arc_len);
        const Mat3 dM = notch_transform_dkappa(kappa, arc_len);
        for (Mat3& d : D) {
            d = d * M;
        }
        D.push_back(T * dM);
        T = T * M;
    }
};

void emit_frame_with_grad(const ChainState& chain, const RobotParams& params,
                          PointLocation loc, int total, RobotShape& shape,
                          ShapeJacobian& jac)
{
    const int f = static_cast<int>(shape.frames.size());
    shape.frames.push_back(chain.T);

    const Eigen::Matrix2d R = chain.T.topLeftCorner<2, 2>();
    const Vec2 t = chain.T.topRightCorner<2, 1>();
    const Vec2 offsets[3] = {Vec2(0.0, 0.0), Vec2(-params.r, 0.0), Vec2(params.r, 0.0)};
    const PointRole roles[3] = {PointRole::kBackbone, PointRole::kLeftEdge,
                                PointRole::kRightEdge};

    for (int k = 0; k < 3; ++k) {
        shape.points.push_back({t + R * offsets[k], roles[k], loc, f});
        Eigen::Matrix2Xd dp = Eigen::Matrix2Xd::Zero(2, total);
        const Vec3 o(offsets[k].x(), offsets[k].y(), 1.0);
        for (int j = 0; j < static_cast<int>(chain.D.size()); ++j) {
            dp.col(j) = (chain.D[j] * o).head<2>();
        }
        jac.dpoints.push_back(std::move(dp));
    }
}

} // namespace

RobotShape forward_kinematics_with_jacobian(const RobotParams& params, double q_a,
                                            const CurvatureVector& kappa,
                                            ShapeJacobian& jac)
{
    params.validate();
    if (kappa.size() != params.num_notches()) {
        throw std::invalid_argument("forward_kinematics_with_jacobian: kappa length mismatch");
    }

    const int n = params.num_notches();
    RobotShape shape;
    shape.frames.reserve(frame_count(params));
    shape.points.reserve(3 * frame_count(params));
    jac.dpoints.clear();
    jac.dpoints.reserve(3 * frame_count(params));

    ChainState chain;
    chain.T = translation_z(q_a);
    chain.D.reserve(n);

    for (int i = 0; i < params.m_p; ++i) {
        emit_frame_with_grad(chain, params, PointLocation::kProximalBody, n, shape, jac);
        chain.append_notch(kappa[i], params.l_p);
        const bool last = (i + 1 == params.m_p);
        emit_frame_with_grad(chain, params,
                             last ? PointLocation::kProximalEnd : PointLocation::kProximalBody,
                             n, shape, jac);
        if (!last) {
            chain.append_fixed(translation_z(params.c_p));
        }
    }

    chain.append_fixed(translation_z(params.l_s));
    for (int i = 0; i < params.m_d; ++i) {
        emit_frame_with_grad(chain, params, PointLocation::kDistalBody, n, shape, jac);
        chain.append_notch(kappa[params.m_p + i], params.l_d);
        const bool last = (i + 1 == params.m_d);
        emit_frame_with_grad(chain, params,
                             last ? PointLocation::kDistalTip : PointLocation::kDistalBody,
                             n, shape, jac);
        if (!last) {
            chain.append_fixed(translation_z(params.c_d));
        }
    }

    chain.append_fixed(translation_z(params.l_s));
    emit_frame_with_grad(chain, params, PointLocation::kDistalTip, n, shape, jac);

    shape.tip.x = chain.T(0, 2);
    shape.tip.z = chain.T(1, 2);
    shape.tip.phi = std::atan2(chain.T(0, 1), chain.T(0, 0));
    return shape;
}

ShapeJacobian point_jacobians(const RobotParams& params, double q_a,
                              const CurvatureVector& kappa)
{
    ShapeJacobian jac;
    forward_kinematics_with_jacobian(params, q_a, kappa, jac);
    return jac;
}

Eigen::RowVectorXd tendon_constraint_gradient(const RobotParams& params,
                                              const RobotShape& shape,
                                              const ShapeJacobian& jac, Segment seg,
                                              int* degenerate_chords)
{
    const int n = params.num_notches();
    const int m = (seg == Segment::kProximal) ? params.m_p : params.m_d;
    Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(n);
    int degenerate = 0;

    for (int i = 0; i < m; ++i) {
        const int ia = shape.point_index(notch_base_frame(params, seg, i), PointRole::kLeftEdge);
        const int ib = shape.point_index(notch_end_frame(params, seg, i), PointRole::kLeftEdge);
        const Vec2 v = shape.points[ib].p - shape.points[ia].p;
        const double len = v.norm();
        if (len < 1e-12) {
            ++degenerate;
            continue;
        }
        const Vec2 vhat = v / len;
        grad -= vhat.transpose() * (jac.dpoints[ib] - jac.dpoints[ia]);
    }
    if (degenerate_chords) {
        *degenerate_chords = degenerate;
    }
    return grad;
}

std::vector<ClearanceRow> clearance_constraints(const RobotShape& shape,
                                                const ShapeJacobian& jac,
                                                const Environment& env, double gamma1,
                                                double thin_radius, double active_cushion,
                                                int max_active)
{
    std::vector<ClearanceRow> rows;
    const int n = jac.dpoints.empty() ? 0 : static_cast<int>(jac.dpoints.front().cols());

    for (int k = 0; k < static_cast<int>(shape.points.size()); ++k) {
        double d = 0.0;
        env.nearest(shape.points[k].p, &d);
        if (d > thin_radius) {
            continue;
        }
        const std::vector<int> active =
            env.within(shape.points[k].p, d + active_cushion);
        const int count = std::min<int>(max_active, static_cast<int>(active.size()));
        for (int j = 0; j < count; ++j) {
            const Vec2& w = env.points()[active[j]];
            const double dist = (shape.points[k].p - w).norm();
            ClearanceRow row;
            row.point = k;
            row.env_point = active[j];
            row.value = dist - gamma1;
            if (dist < 1e-12) {
                row.grad = Eigen::RowVectorXd::Zero(n);
                row.degenerate = true;
            } else {
                const Vec2 dhat = (shape.points[k].p - w) / dist;
                row.grad = dhat.transpose() * jac.dpoints[k];
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace tendril

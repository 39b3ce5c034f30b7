#include <tendril/robot.hpp>

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace tendril {

void RobotParams::validate() const
{
    if (m_p < 1 || m_d < 1) {
        throw std::invalid_argument("RobotParams: notch counts must be >= 1");
    }
    if (l_p <= 0.0 || l_d <= 0.0 || c_p <= 0.0 || c_d <= 0.0 || l_s <= 0.0 || r <= 0.0) {
        throw std::invalid_argument("RobotParams: all lengths must be > 0");
    }
}

std::vector<int> RobotShape::location_slice(PointLocation loc) const
{
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        if (points[i].loc == loc) {
            idx.push_back(i);
        }
    }
    return idx;
}

int notch_base_frame(const RobotParams& params, Segment seg, int notch)
{
    return (seg == Segment::kProximal) ? 2 * notch : 2 * params.m_p + 2 * notch;
}

int notch_end_frame(const RobotParams& params, Segment seg, int notch)
{
    return notch_base_frame(params, seg, notch) + 1;
}

int tip_frame(const RobotParams& params)
{
    return 2 * params.m_p + 2 * params.m_d;
}

int frame_count(const RobotParams& params)
{
    return 2 * params.m_p + 2 * params.m_d + 1;
}

Mat3 notch_transform(double kappa, double arc_len)
{
    const double theta = kappa * arc_len;
    double tx, tz;
    if (std::abs(kappa) < kKappaEps) {
        tx = 0.5 * kappa * arc_len * arc_len;
        tz = arc_len * (1.0 - theta * theta / 6.0);
    } else {
        tx = (1.0 - std::cos(theta)) / kappa;
        tz = std::sin(theta) / kappa;
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat3 T;
    T << c, s, tx,
        -s, c, tz,
         0.0, 0.0, 1.0;
    return T;
}

Mat3 translation_z(double dz)
{
    Mat3 T = Mat3::Identity();
    T(1, 2) = dz;
    return T;
}

namespace {

void emit_frame(const Mat3& T, double r, PointLocation loc, RobotShape& out)
{
    const int f = static_cast<int>(out.frames.size());
    out.frames.push_back(T);
    const Eigen::Matrix2d R = T.topLeftCorner<2, 2>();
    const Vec2 t = T.topRightCorner<2, 1>();
    out.points.push_back({t, PointRole::kBackbone, loc, f});
    out.points.push_back({t + R * Vec2(-r, 0.0), PointRole::kLeftEdge, loc, f});
    out.points.push_back({t + R * Vec2(r, 0.0), PointRole::kRightEdge, loc, f});
}

} // namespace

RobotShape forward_kinematics(const RobotParams& params, double q_a,
                              const CurvatureVector& kappa)
{
    params.validate();
    if (kappa.size() != params.num_notches()) {
        throw std::invalid_argument("forward_kinematics: kappa length != m_p + m_d");
    }

    RobotShape shape;
    shape.frames.reserve(frame_count(params));
    shape.points.reserve(3 * frame_count(params));

    Mat3 T = translation_z(q_a);
    for (int i = 0; i < params.m_p; ++i) {
        emit_frame(T, params.r, PointLocation::kProximalBody, shape);
        T = T * notch_transform(kappa[i], params.l_p);
        const bool last = (i + 1 == params.m_p);
        emit_frame(T, params.r,
                   last ? PointLocation::kProximalEnd : PointLocation::kProximalBody, shape);
        if (!last) {
            T = T * translation_z(params.c_p);
        }
    }

    T = T * translation_z(params.l_s);
    for (int i = 0; i < params.m_d; ++i) {
        emit_frame(T, params.r, PointLocation::kDistalBody, shape);
        T = T * notch_transform(kappa[params.m_p + i], params.l_d);
        const bool last = (i + 1 == params.m_d);
        emit_frame(T, params.r,
                   last ? PointLocation::kDistalTip : PointLocation::kDistalBody, shape);
        if (!last) {
            T = T * translation_z(params.c_d);
        }
    }

    T = T * translation_z(params.l_s);
    emit_frame(T, params.r, PointLocation::kDistalTip, shape);

    shape.tip.x = T(0, 2);
    shape.tip.z = T(1, 2);
    shape.tip.phi = std::atan2(T(0, 1), T(0, 0));
    return shape;
}

double tendon_length(const RobotParams& params, const RobotShape& shape, Segment seg)
{
    if (static_cast<int>(shape.frames.size()) != frame_count(params)) {
        throw std::invalid_argument("tendon_length: shape does not match params");
    }
    const int m = (seg == Segment::kProximal) ? params.m_p : params.m_d;
    const double c = (seg == Segment::kProximal) ? params.c_p : params.c_d;

    double len = c * (m - 1);
    for (int i = 0; i < m; ++i) {
        const Vec2& a =
            shape.points[shape.point_index(notch_base_frame(params, seg, i), PointRole::kLeftEdge)].p;
        const Vec2& b =
            shape.points[shape.point_index(notch_end_frame(params, seg, i), PointRole::kLeftEdge)].p;
        len += (b - a).norm();
    }
    return len;
}

double straight_tendon_length(const RobotParams& params, Segment seg)
{
    const int m = (seg == Segment::kProximal) ? params.m_p : params.m_d;
    const double c = (seg == Segment::kProximal) ? params.c_p : params.c_d;
    const double l = (seg == Segment::kProximal) ? params.l_p : params.l_d;
    return c * (m - 1) + m * l;
}

double left_chord_length(double kappa, double arc_len, double r)
{
    const double half = 0.5 * kappa * arc_len;
    if (std::abs(kappa) < kKappaEps) {
        // 2*(1/k + r)*sin(k l / 2) -> l + r k l - k^2 l^3 / 24
        return arc_len + r * kappa * arc_len - kappa * kappa * arc_len * arc_len * arc_len / 24.0;
    }
    return 2.0 * (1.0 / kappa + r) * std::sin(half);
}

double manipulability_mu1(const Mat3& J)
{
    if (!J.allFinite()) {
        return kMu1Clip;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(J * J.transpose());
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(2);
    if (lmin <= 0.0 || lmax <= 0.0) {
        return kMu1Clip;
    }
    const double mu = std::sqrt(lmax / lmin);
    return (std::isfinite(mu) && mu < kMu1Clip) ? mu : kMu1Clip;
}

} // namespace tendril

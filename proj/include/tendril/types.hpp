#pragma once

#include <Eigen/Core>
#include <cmath>

namespace tendril {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a)
{
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) {
        a += 2.0 * M_PI;
    }
    return a;
}

/// Planar tip pose: position in the x-z plane (mm) and orientation about
/// the y axis (rad), wrapped to (-pi, pi].
struct TipPose {
    double x = 0.0;
    double z = 0.0;
    double phi = 0.0;

    Vec3 vec() const { return Vec3(x, z, phi); }
};

/// Joint configuration: axial insertion q_a (mm) and commanded tendon
/// lengths q_p, q_d of the proximal and distal segments (mm).
struct JointConfig {
    double qa = 0.0;
    double qp = 0.0;
    double qd = 0.0;

    Vec3 vec() const { return Vec3(qa, qp, qd); }
};

/// Per-step joint increment (mm).
struct ControlInput {
    double dua = 0.0;
    double dup = 0.0;
    double dud = 0.0;

    Vec3 vec() const { return Vec3(dua, dup, dud); }
    static ControlInput zero() { return ControlInput{}; }
};

inline JointConfig operator+(const JointConfig& q, const ControlInput& u)
{
    return JointConfig{q.qa + u.dua, q.qp + u.dup, q.qd + u.dud};
}

inline ControlInput operator-(const JointConfig& a, const JointConfig& b)
{
    return ControlInput{a.qa - b.qa, a.qp - b.qp, a.qd - b.qd};
}

/// Axis-aligned bounding box in the x-z plane.
struct Aabb {
    Vec2 lo = Vec2::Zero();
    Vec2 hi = Vec2::Zero();
};

} // namespace tendril

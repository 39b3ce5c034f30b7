#pragma once

#include <tendril/types.hpp>

#include <Eigen/Dense>

#include <vector>

namespace tendril {

/// Curvature threshold below which the constant-curvature transform and its
/// derivative switch to their Taylor-series branch.
constexpr double kKappaEps = 1e-6;

/// Reporting clip for the manipulability measure.
constexpr double kMu1Clip = 500.0;

/// Geometric parameters of the two-segment notched tube (lengths in mm).
/// Defaults describe the robot used throughout the test fixtures.
struct RobotParams {
    int m_p = 27;       // proximal notch count
    int m_d = 15;       // distal notch count
    double l_p = 1.7;   // proximal notch arc length
    double l_d = 1.43;  // distal notch arc length
    double c_p = 2.0;   // proximal uncut height
    double c_d = 1.07;  // distal uncut height
    double l_s = 5.0;   // spacer length at each tendon termination
    double r = 3.0;     // tube radius

    int num_notches() const { return m_p + m_d; }

    /// Throws std::invalid_argument on non-positive lengths or notch counts
    /// below one.
    void validate() const;
};

/// One signed curvature per notch (1/mm), proximal notches first.
using CurvatureVector = Eigen::VectorXd;

enum class Segment { kProximal, kDistal };

enum class PointRole : unsigned char { kBackbone = 0, kLeftEdge = 1, kRightEdge = 2 };

enum class PointLocation : unsigned char {
    kProximalBody,
    kProximalEnd,
    kDistalBody,
    kDistalTip,
};

struct ShapePoint {
    Vec2 p = Vec2::Zero();
    PointRole role = PointRole::kBackbone;
    PointLocation loc = PointLocation::kProximalBody;
    int frame = 0;
};

/// Discrete point-set representation of the robot at one configuration.
///
/// Frames are emitted in chain order: for each notch its base frame and end
/// frame, then the tip frame after the final spacer. Points are frame-major
/// with three points per frame (backbone, left edge at -r, right edge at +r),
/// so points[3*f + role] belongs to frame f.
struct RobotShape {
    std::vector<ShapePoint> points;
    std::vector<Mat3> frames;
    TipPose tip;

    int point_index(int frame, PointRole role) const
    {
        return 3 * frame + static_cast<int>(role);
    }

    /// Indices of the points in a given location slice.
    std::vector<int> location_slice(PointLocation loc) const;
};

// Frame bookkeeping shared by the kinematics and the gradient engine. Frame
// layout: proximal bases/ends interleaved (2*m_p frames), then distal
// (2*m_d), then the tip frame.
int notch_base_frame(const RobotParams& params, Segment seg, int notch);
int notch_end_frame(const RobotParams& params, Segment seg, int notch);
int tip_frame(const RobotParams& params);
int frame_count(const RobotParams& params);

/// Planar homogeneous transform of a constant-curvature arc: rotation
/// theta = kappa * arc_len about y with translation
/// ((1 - cos theta)/kappa, sin theta / kappa). Below kKappaEps the
/// second-order series branch is used so the map is continuous at zero.
Mat3 notch_transform(double kappa, double arc_len);

/// Pure translation along the local z axis.
Mat3 translation_z(double dz);

/// Composes the insertion translation with the proximal chain, spacer,
/// distal chain and final spacer and emits the full labeled point set.
/// Throws std::invalid_argument if kappa.size() != m_p + m_d.
RobotShape forward_kinematics(const RobotParams& params, double q_a,
                              const CurvatureVector& kappa);

/// Calculated tendon length of one segment: c * (m - 1) plus the sum of
/// left-edge chord lengths across each notch.
double tendon_length(const RobotParams& params, const RobotShape& shape, Segment seg);

/// Tendon length of a segment in the straight configuration
/// (c * (m - 1) + m * l).
double straight_tendon_length(const RobotParams& params, Segment seg);

/// Left-edge chord length across a single notch under uniform curvature,
/// 2 * (1/kappa + r) * sin(kappa * l / 2), continuous at kappa = 0 (value l).
/// Signed kappa: positive curvature bends away from the left tendon and
/// lengthens the chord.
double left_chord_length(double kappa, double arc_len, double r);

/// Condition-number manipulability sqrt(lmax(J J^T) / lmin(J J^T)),
/// clipped at kMu1Clip; singular J reports the clip value.
double manipulability_mu1(const Mat3& J);

} // namespace tendril

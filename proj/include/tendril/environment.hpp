#pragma once

#include <tendril/kdtree.hpp>
#include <tendril/robot.hpp>
#include <tendril/types.hpp>

#include <span>
#include <vector>

namespace tendril {

/// 2D environment point cloud with a spatial index for nearest-neighbor
/// queries. Immutable after construction.
class Environment {
public:
    /// Throws std::invalid_argument on an empty point set.
    explicit Environment(std::vector<Vec2> points);

    const std::vector<Vec2>& points() const { return points_; }
    const Aabb& bounds() const { return bounds_; }

    /// Index of the nearest environment point; optionally its distance.
    int nearest(const Vec2& q, double* dist = nullptr) const;

    /// Distance from q to the nearest environment point.
    double distance(const Vec2& q) const;

    /// Indices of environment points within radius of q, sorted by
    /// (distance, index).
    std::vector<int> within(const Vec2& q, double radius) const;

private:
    std::vector<Vec2> points_;
    KdTree2 tree_;
    Aabb bounds_;
};

/// Euclidean distance between two point sets (minimum over all pairs).
/// Throws std::invalid_argument if either set is empty.
double set_distance(std::span<const Vec2> a, std::span<const Vec2> b);

/// Point-to-set distance. Throws on an empty set.
double set_distance(const Vec2& a, std::span<const Vec2> b);

/// Minimum distance from a set of points to the environment.
double set_distance(std::span<const Vec2> a, const Environment& env);

/// Minimum distance from a slice of shape points (by index) to the
/// environment. Returns +inf for an empty slice.
double slice_distance(const RobotShape& shape, const std::vector<int>& slice,
                      const Environment& env);

} // namespace tendril

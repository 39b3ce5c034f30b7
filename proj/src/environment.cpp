#include <tendril/environment.hpp>

#include <limits>
#include <stdexcept>
#include <utility>

namespace tendril {

Environment::Environment(std::vector<Vec2> points)
    : points_(std::move(points))
{
    if (points_.empty()) {
        throw std::invalid_argument("Environment: point set must be nonempty");
    }
    tree_ = KdTree2(points_);
    bounds_.lo = points_.front();
    bounds_.hi = points_.front();
    for (const Vec2& p : points_) {
        bounds_.lo = bounds_.lo.cwiseMin(p);
        bounds_.hi = bounds_.hi.cwiseMax(p);
    }
}

int Environment::nearest(const Vec2& q, double* dist) const
{
    return tree_.nearest(q, dist);
}

double Environment::distance(const Vec2& q) const
{
    double d = 0.0;
    tree_.nearest(q, &d);
    return d;
}

std::vector<int> Environment::within(const Vec2& q, double radius) const
{
    return tree_.radius(q, radius);
}

double set_distance(std::span<const Vec2> a, std::span<const Vec2> b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("set_distance: empty point set");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& pa : a) {
        for (const Vec2& pb : b) {
            best = std::min(best, (pa - pb).norm());
        }
    }
    return best;
}

double set_distance(const Vec2& a, std::span<const Vec2> b)
{
    return set_distance(std::span<const Vec2>(&a, 1), b);
}

double set_distance(std::span<const Vec2> a, const Environment& env)
{
    if (a.empty()) {
        throw std::invalid_argument("set_distance: empty point set");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& p : a) {
        best = std::min(best, env.distance(p));
    }
    return best;
}

double slice_distance(const RobotShape& shape, const std::vector<int>& slice,
                      const Environment& env)
{
    double best = std::numeric_limits<double>::infinity();
    for (int i : slice) {
        best = std::min(best, env.distance(shape.points[i].p));
    }
    return best;
}

} // namespace tendril

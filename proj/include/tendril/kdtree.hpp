#pragma once

#include <tendril/types.hpp>

#include <vector>

namespace tendril {

/// Static 2D kd-tree over a fixed point array. Immutable after construction
/// and safe to share between threads. Nearest-neighbor ties resolve to the
/// smallest original point index so queries are deterministic.
class KdTree2 {
public:
    KdTree2() = default;
    explicit KdTree2(const std::vector<Vec2>& points);

    bool empty() const { return nodes_.empty(); }

    /// Index (into the construction array) of the nearest point to q.
    /// Optionally reports the distance. Returns -1 on an empty tree.
    int nearest(const Vec2& q, double* dist = nullptr) const;

    /// Original indices of all points within radius of q, sorted by
    /// (distance, index).
    std::vector<int> radius(const Vec2& q, double r) const;

private:
    struct Node {
        Vec2 p;
        int index;     // original index
        int axis;      // split dimension
        int left = -1;
        int right = -1;
    };

    int build(std::vector<int>& ids, int lo, int hi, const std::vector<Vec2>& pts);
    void search(int node, const Vec2& q, double& best_d2, int& best_idx) const;
    void search_radius(int node, const Vec2& q, double r2,
                       std::vector<std::pair<double, int>>& hits) const;

    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace tendril

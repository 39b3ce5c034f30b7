#include <tendril/kdtree.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace tendril {

KdTree2::KdTree2(const std::vector<Vec2>& points)
{
    if (points.empty()) {
        return;
    }
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    nodes_.reserve(points.size());
    root_ = build(ids, 0, static_cast<int>(ids.size()), points);
}

int KdTree2::build(std::vector<int>& ids, int lo, int hi, const std::vector<Vec2>& pts)
{
    if (lo >= hi) {
        return -1;
    }

    // split along the larger extent of this subset
    Vec2 mn = pts[ids[lo]];
    Vec2 mx = mn;
    for (int i = lo + 1; i < hi; ++i) {
        mn = mn.cwiseMin(pts[ids[i]]);
        mx = mx.cwiseMax(pts[ids[i]]);
    }
    const int axis = ((mx - mn).x() >= (mx - mn).y()) ? 0 : 1;

    const int mid = (lo + hi) / 2;
    std::nth_element(ids.begin() + lo, ids.begin() + mid, ids.begin() + hi,
                     [&](int a, int b) {
                         if (pts[a][axis] != pts[b][axis]) {
                             return pts[a][axis] < pts[b][axis];
                         }
                         return a < b;
                     });

    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{pts[ids[mid]], ids[mid], axis, -1, -1});
    const int left = build(ids, lo, mid, pts);
    const int right = build(ids, mid + 1, hi, pts);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree2::search(int node, const Vec2& q, double& best_d2, int& best_idx) const
{
    if (node < 0) {
        return;
    }
    const Node& n = nodes_[node];
    const double d2 = (n.p - q).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && n.index < best_idx)) {
        best_d2 = d2;
        best_idx = n.index;
    }

    const double delta = q[n.axis] - n.p[n.axis];
    const int near = (delta < 0.0) ? n.left : n.right;
    const int far = (delta < 0.0) ? n.right : n.left;
    search(near, q, best_d2, best_idx);
    if (delta * delta <= best_d2) {
        search(far, q, best_d2, best_idx);
    }
}

void KdTree2::search_radius(int node, const Vec2& q, double r2,
                            std::vector<std::pair<double, int>>& hits) const
{
    if (node < 0) {
        return;
    }
    const Node& n = nodes_[node];
    const double d2 = (n.p - q).squaredNorm();
    if (d2 <= r2) {
        hits.emplace_back(d2, n.index);
    }
    const double delta = q[n.axis] - n.p[n.axis];
    const int near = (delta < 0.0) ? n.left : n.right;
    const int far = (delta < 0.0) ? n.right : n.left;
    search_radius(near, q, r2, hits);
    if (delta * delta <= r2) {
        search_radius(far, q, r2, hits);
    }
}

std::vector<int> KdTree2::radius(const Vec2& q, double r) const
{
    std::vector<std::pair<double, int>> hits;
    if (!nodes_.empty() && r >= 0.0) {
        search_radius(root_, q, r * r, hits);
    }
    std::sort(hits.begin(), hits.end());
    std::vector<int> out;
    out.reserve(hits.size());
    for (const auto& [d2, idx] : hits) {
        out.push_back(idx);
    }
    return out;
}

int KdTree2::nearest(const Vec2& q, double* dist) const
{
    if (nodes_.empty()) {
        if (dist) {
            *dist = std::numeric_limits<double>::infinity();
        }
        return -1;
    }
    double best_d2 = std::numeric_limits<double>::infinity();
    int best_idx = std::numeric_limits<int>::max();
    search(root_, q, best_d2, best_idx);
    if (dist) {
        *dist = std::sqrt(best_d2);
    }
    return best_idx;
}

} // namespace tendril

#include <tendril/workspace.hpp>

#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace tendril {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 4-connected action set; order fixed for determinism
constexpr int kDx[4] = {0, 0, -1, 1};
constexpr int kDz[4] = {1, -1, 0, 0};

} // namespace

void GoalSet::validate() const
{
    if (x_min >= x_max || z_min >= z_max) {
        throw std::invalid_argument("GoalSet: position box must be nonempty");
    }
    if (phi_max <= 0.0 || phi_max > M_PI) {
        throw std::invalid_argument("GoalSet: phi_max must be in (0, pi]");
    }
}

TaskGrid build_grid(const Environment& env, double cell_size, const Vec2& origin,
                    int width, int height, std::size_t cell_cap)
{
    if (cell_size <= 0.0) {
        throw std::invalid_argument("build_grid: cell_size must be > 0");
    }
    if (width <= 0 || height <= 0 ||
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > cell_cap) {
        throw std::invalid_argument("build_grid: cell count exceeds cap");
    }

    TaskGrid grid;
    grid.origin = origin;
    grid.cell_size = cell_size;
    grid.width = width;
    grid.height = height;
    grid.blocked.assign(static_cast<std::size_t>(width) * height, 0);

    for (const Vec2& p : env.points()) {
        if (!grid.contains(p)) {
            throw std::invalid_argument("build_grid: environment point outside grid window");
        }
    }

    const double rad = 0.5 * cell_size;
    for (int iz = 0; iz < height; ++iz) {
        for (int ix = 0; ix < width; ++ix) {
            if (env.distance(grid.center(ix, iz)) <= rad) {
                grid.blocked[grid.index(ix, iz)] = 1;
            }
        }
    }
    return grid;
}

TaskGrid build_grid(const Environment& env, double cell_size, double margin,
                    double extra_below, std::size_t cell_cap)
{
    const Aabb& bb = env.bounds();
    const Vec2 lo(bb.lo.x() - margin, bb.lo.y() - margin - extra_below);
    const Vec2 hi(bb.hi.x() + margin, bb.hi.y() + margin);
    const int width = static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_size)) + 1;
    const int height = static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_size)) + 1;
    return build_grid(env, cell_size, lo, width, height, cell_cap);
}

PartitionField compute_partitions(const TaskGrid& grid, const GoalSet& goal)
{
    goal.validate();
    const int w = grid.width;
    const int h = grid.height;
    const int ncells = w * h;

    std::vector<int> goal_cells;
    for (int iz = 0; iz < h; ++iz) {
        for (int ix = 0; ix < w; ++ix) {
            const Vec2 c = grid.center(ix, iz);
            if (!grid.blocked[grid.index(ix, iz)] && goal.contains_pos(c.x(), c.y())) {
                goal_cells.push_back(grid.index(ix, iz));
            }
        }
    }
    if (goal_cells.empty()) {
        throw std::runtime_error("compute_partitions: goal box contains no free cell");
    }

    // 0/1-BFS over (cell, last action); cost = 1 + number of action switches
    // along a reversed path from the goal
    constexpr int kUnset = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<std::size_t>(ncells) * 4, kUnset);
    std::deque<std::pair<int, int>> dq; // (cell, action)

    for (int g : goal_cells) {
        const int gx = g % w;
        const int gz = g / w;
        for (int a = 0; a < 4; ++a) {
            const int nx = gx + kDx[a];
            const int nz = gz + kDz[a];
            if (!grid.is_free(nx, nz)) {
                continue;
            }
            const std::size_t s = static_cast<std::size_t>(grid.index(nx, nz)) * 4 + a;
            if (dist[s] > 1) {
                dist[s] = 1;
                dq.emplace_back(grid.index(nx, nz), a);
            }
        }
    }

    while (!dq.empty()) {
        const auto [cell, act] = dq.front();
        dq.pop_front();
        const int d = dist[static_cast<std::size_t>(cell) * 4 + act];
        const int cx = cell % w;
        const int cz = cell / w;
        for (int a = 0; a < 4; ++a) {
            const int nx = cx + kDx[a];
            const int nz = cz + kDz[a];
            if (!grid.is_free(nx, nz)) {
                continue;
            }
            const int nd = d + (a != act ? 1 : 0);
            const std::size_t s = static_cast<std::size_t>(grid.index(nx, nz)) * 4 + a;
            if (nd < dist[s]) {
                dist[s] = nd;
                if (a != act) {
                    dq.emplace_back(grid.index(nx, nz), a);
                } else {
                    dq.emplace_front(grid.index(nx, nz), a);
                }
            }
        }
    }

    PartitionField parts;
    parts.width = w;
    parts.height = h;
    parts.ell.assign(ncells, -1);
    for (int c = 0; c < ncells; ++c) {
        int best = kUnset;
        for (int a = 0; a < 4; ++a) {
            best = std::min(best, dist[static_cast<std::size_t>(c) * 4 + a]);
        }
        if (best != kUnset) {
            parts.ell[c] = best;
        }
    }
    for (int g : goal_cells) {
        parts.ell[g] = 1;
    }
    parts.max_ell = 0;
    for (int v : parts.ell) {
        parts.max_ell = std::max(parts.max_ell, v);
    }
    return parts;
}

int partition_lookup(const TaskGrid& grid, const PartitionField& parts, const Vec2& p)
{
    int ix, iz;
    grid.cell_of(p, ix, iz);
    if (!grid.in_bounds(ix, iz)) {
        throw std::out_of_range("partition_lookup: position outside grid");
    }
    const int v = parts.ell[grid.index(ix, iz)];
    return (v < 0) ? parts.sentinel() : v;
}

HeuristicField compute_heuristic(const TaskGrid& grid, const GoalSet& goal,
                                 const PartitionField& parts, double c_app,
                                 double r_approach)
{
    const int w = grid.width;
    const int h = grid.height;

    HeuristicField field;
    field.width = w;
    field.height = h;
    field.c_app = c_app;
    field.r_approach = r_approach;
    field.h.assign(static_cast<std::size_t>(w) * h, kInf);

    using Entry = std::pair<double, int>; // (dist, cell)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;

    for (int iz = 0; iz < h; ++iz) {
        for (int ix = 0; ix < w; ++ix) {
            const int c = grid.index(ix, iz);
            const Vec2 p = grid.center(ix, iz);
            if (!grid.blocked[c] && goal.contains_pos(p.x(), p.y())) {
                field.h[c] = 0.0;
                open.emplace(0.0, c);
            }
        }
    }

    while (!open.empty()) {
        const auto [d, cell] = open.top();
        open.pop();
        if (d > field.h[cell]) {
            continue;
        }
        const int cx = cell % w;
        const int cz = cell / w;
        for (int a = 0; a < 4; ++a) {
            const int nx = cx + kDx[a];
            const int nz = cz + kDz[a];
            if (!grid.is_free(nx, nz)) {
                continue;
            }
            const int nc = grid.index(nx, nz);
            const Vec2 p = grid.center(nx, nz);
            double wstep = grid.cell_size;
            if (goal.distance_pos(p.x(), p.y()) < r_approach && parts.ell[nc] != 1) {
                wstep += c_app;
            }
            if (d + wstep < field.h[nc]) {
                field.h[nc] = d + wstep;
                open.emplace(field.h[nc], nc);
            }
        }
    }
    return field;
}

} // namespace tendril

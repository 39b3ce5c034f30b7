#pragma once

#include <tendril/environment.hpp>
#include <tendril/types.hpp>

#include <cstdint>
#include <vector>

namespace tendril {

/// Tip-pose goal set: a position box plus an orientation band |phi| <= phi_max.
struct GoalSet {
    double x_min = 0.0;
    double x_max = 0.0;
    double z_min = 0.0;
    double z_max = 0.0;
    double phi_max = 0.0; // rad, in (0, pi]

    bool contains_pos(double x, double z) const
    {
        return x >= x_min && x <= x_max && z >= z_min && z <= z_max;
    }
    bool contains(const TipPose& p) const
    {
        return contains_pos(p.x, p.z) && std::abs(p.phi) <= phi_max;
    }
    /// Euclidean distance from a point to the position box (0 inside).
    double distance_pos(double x, double z) const
    {
        const double dx = std::max({x_min - x, 0.0, x - x_max});
        const double dz = std::max({z_min - z, 0.0, z - z_max});
        return std::hypot(dx, dz);
    }
    void validate() const; // throws std::invalid_argument
};

/// Regular occupancy grid over the planning plane. A cell is blocked exactly
/// when some environment point lies within cell_size/2 of its center.
struct TaskGrid {
    Vec2 origin = Vec2::Zero(); // world position of cell (0, 0)'s center
    double cell_size = 1.0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> blocked; // row-major [iz * width + ix]

    int index(int ix, int iz) const { return iz * width + ix; }
    bool in_bounds(int ix, int iz) const
    {
        return ix >= 0 && ix < width && iz >= 0 && iz < height;
    }
    bool is_free(int ix, int iz) const { return in_bounds(ix, iz) && !blocked[index(ix, iz)]; }
    Vec2 center(int ix, int iz) const
    {
        return origin + Vec2(ix * cell_size, iz * cell_size);
    }
    /// Cell containing a world point (cells are squares centered on centers).
    void cell_of(const Vec2& p, int& ix, int& iz) const
    {
        ix = static_cast<int>(std::floor((p.x() - origin.x()) / cell_size + 0.5));
        iz = static_cast<int>(std::floor((p.y() - origin.y()) / cell_size + 0.5));
    }
    bool contains(const Vec2& p) const
    {
        int ix, iz;
        cell_of(p, ix, iz);
        return in_bounds(ix, iz);
    }
};

/// Rasterizes the environment onto an explicit grid window. Throws
/// std::invalid_argument on non-positive cell size, a cell count above
/// cell_cap, or environment points outside the window.
TaskGrid build_grid(const Environment& env, double cell_size, const Vec2& origin,
                    int width, int height, std::size_t cell_cap = 4'000'000);

/// Convenience overload: grid window derived from the environment bounds
/// expanded by margin on all sides plus extra_below under the low-z edge
/// (the robot entry region).
TaskGrid build_grid(const Environment& env, double cell_size, double margin = 15.0,
                    double extra_below = 30.0, std::size_t cell_cap = 4'000'000);

/// Per-cell minimal number of task-space motion types needed to reach the
/// goal box over collision-free 4-connected paths; -1 marks unreachable or
/// blocked cells. Cells inside the goal box have value 1.
struct PartitionField {
    int width = 0;
    int height = 0;
    std::vector<int> ell;
    int max_ell = 0;

    int at(int ix, int iz) const { return ell[iz * width + ix]; }
    int sentinel() const { return max_ell + 1; }
};

/// Layered 0/1-BFS over (cell, last-action) states counting action-type
/// switches. Throws std::runtime_error if the goal box contains no free cell.
PartitionField compute_partitions(const TaskGrid& grid, const GoalSet& goal);

/// Partition value at a tip position; blocked or unreachable cells map to the
/// sentinel (largest value + 1). Throws std::out_of_range outside the grid.
int partition_lookup(const TaskGrid& grid, const PartitionField& parts, const Vec2& p);

/// Scalar cost-to-goal per cell from a backward Dijkstra expansion: step cost
/// cell_size per 4-neighbor move plus an approach penalty c_app on entering a
/// cell within r_approach of the goal box but not in partition 1. Unreachable
/// cells hold +inf.
struct HeuristicField {
    int width = 0;
    int height = 0;
    std::vector<double> h;
    double c_app = 0.0;
    double r_approach = 0.0;

    double at(int ix, int iz) const { return h[iz * width + ix]; }
};

HeuristicField compute_heuristic(const TaskGrid& grid, const GoalSet& goal,
                                 const PartitionField& parts, double c_app,
                                 double r_approach);

} // namespace tendril

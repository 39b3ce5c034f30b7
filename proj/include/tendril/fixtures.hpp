#pragma once

#include <tendril/io.hpp>

#include <filesystem>
#include <vector>

namespace tendril::fixtures {

/// Appends points sampled along a segment from a to b at roughly `spacing`.
void append_line(std::vector<Vec2>& pts, const Vec2& a, const Vec2& b,
                 double spacing = 0.4);

/// Appends points along a circular arc (angles in rad, swept from ang0 to
/// ang1 in either direction).
void append_arc(std::vector<Vec2>& pts, const Vec2& center, double radius,
                double ang0, double ang1, double spacing = 0.4);

// Synthetic vessel-like corridors (wall point clouds, mm). All three are
// entered from below along the z axis.

/// Straight vertical corridor, capped at the far end.
std::vector<Vec2> straight_walls(double spacing = 0.4);

/// Vertical entry, one 90-degree bend to the right into a horizontal run
/// with an upward goal branch part way along it.
std::vector<Vec2> lbend_walls(double spacing = 0.4);

/// Vertical entry, bend right, short horizontal run, bend back up into a
/// laterally offset vertical goal corridor.
std::vector<Vec2> sbend_walls(double spacing = 0.4);

// Ready-to-run scenarios bundling the corridor, goal set, start state,
// bounds and mismatch settings used by the test suites.
Scenario straight_scenario();
Scenario lbend_scenario();
Scenario sbend_scenario();

/// Writes <name>.env and <name>.scn for all three fixtures into dir.
void write_all(const std::filesystem::path& dir);

} // namespace tendril::fixtures

#include <tendril/fixtures.hpp>

#include <cmath>

namespace tendril::fixtures {

void append_line(std::vector<Vec2>& pts, const Vec2& a, const Vec2& b, double spacing)
{
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i <= n; ++i) {
        pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
    }
}

void append_arc(std::vector<Vec2>& pts, const Vec2& center, double radius, double ang0,
                double ang1, double spacing)
{
    const double sweep = ang1 - ang0;
    const double len = std::abs(sweep) * radius;
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i <= n; ++i) {
        const double a = ang0 + sweep * (static_cast<double>(i) / n);
        pts.push_back(center + radius * Vec2(std::cos(a), std::sin(a)));
    }
}

namespace {

// Corridor walls are sampled as a band of rows so a discrete solver step
// cannot jump a robot point across a zero-thickness wall: the skin is
// deeper than the largest single-step tip motion on the control lattice.
constexpr double kWallDepth = 4.0;
constexpr double kRowSpacing = 0.5;
constexpr double kAlongSpacing = 0.35;

void thick_line(std::vector<Vec2>& pts, const Vec2& a, const Vec2& b, const Vec2& outward)
{
    for (double d = 0.0; d <= kWallDepth + 1e-9; d += kRowSpacing) {
        append_line(pts, a + d * outward, b + d * outward, kAlongSpacing);
    }
}

// outward_sign +1 thickens away from the center, -1 toward it
void thick_arc(std::vector<Vec2>& pts, const Vec2& center, double radius, double ang0,
               double ang1, int outward_sign)
{
    for (double d = 0.0; d <= kWallDepth + 1e-9; d += kRowSpacing) {
        append_arc(pts, center, radius + outward_sign * d, ang0, ang1, kAlongSpacing);
    }
}

} // namespace

std::vector<Vec2> straight_walls(double /*spacing*/)
{
    std::vector<Vec2> pts;
    thick_line(pts, {-7.0, -40.0}, {-7.0, 150.0}, {-1.0, 0.0});
    thick_line(pts, {7.0, -40.0}, {7.0, 150.0}, {1.0, 0.0});
    thick_line(pts, {-11.0, 150.0}, {11.0, 150.0}, {0.0, 1.0}); // cap
    return pts;
}

std::vector<Vec2> lbend_walls(double /*spacing*/)
{
    const double kPi = M_PI;
    std::vector<Vec2> pts;
    // vertical entry corridor x in [-7, 7] (walls run below the grid so the
    // outside region cannot shortcut into the corridor)
    thick_line(pts, {-7.0, -40.0}, {-7.0, 35.0}, {-1.0, 0.0});
    thick_line(pts, {7.0, -40.0}, {7.0, 35.0}, {1.0, 0.0});
    // 90-degree bend to the right, centerline radius 25 about (25, 35)
    thick_arc(pts, {25.0, 35.0}, 32.0, kPi, 0.5 * kPi, +1);
    thick_arc(pts, {25.0, 35.0}, 18.0, kPi, 0.5 * kPi, -1);
    // horizontal run z in [53, 67] with an upward goal branch at x in [42, 52]
    thick_line(pts, {25.0, 67.0}, {42.0, 67.0}, {0.0, 1.0});
    thick_line(pts, {52.0, 67.0}, {62.0, 67.0}, {0.0, 1.0});
    thick_line(pts, {25.0, 53.0}, {62.0, 53.0}, {0.0, -1.0});
    thick_line(pts, {62.0, 49.0}, {62.0, 71.0}, {1.0, 0.0}); // far end cap
    // goal branch x in [42, 52]
    thick_line(pts, {42.0, 67.0}, {42.0, 95.0}, {-1.0, 0.0});
    thick_line(pts, {52.0, 67.0}, {52.0, 95.0}, {1.0, 0.0});
    thick_line(pts, {38.0, 95.0}, {56.0, 95.0}, {0.0, 1.0}); // branch cap
    return pts;
}

std::vector<Vec2> sbend_walls(double /*spacing*/)
{
    const double kPi = M_PI;
    std::vector<Vec2> pts;
    // vertical entry corridor
    thick_line(pts, {-7.0, -40.0}, {-7.0, 30.0}, {-1.0, 0.0});
    thick_line(pts, {7.0, -40.0}, {7.0, 30.0}, {1.0, 0.0});
    // bend right, centerline radius 20 about (20, 30)
    thick_arc(pts, {20.0, 30.0}, 27.0, kPi, 0.5 * kPi, +1);
    thick_arc(pts, {20.0, 30.0}, 13.0, kPi, 0.5 * kPi, -1);
    // horizontal run z in [43, 57]
    thick_line(pts, {20.0, 57.0}, {35.0, 57.0}, {0.0, 1.0});
    thick_line(pts, {20.0, 43.0}, {35.0, 43.0}, {0.0, -1.0});
    // bend back up, centerline radius 20 about (35, 70)
    thick_arc(pts, {35.0, 70.0}, 27.0, -0.5 * kPi, 0.0, +1);
    thick_arc(pts, {35.0, 70.0}, 13.0, -0.5 * kPi, 0.0, -1);
    // final vertical corridor x in [48, 62], capped
    thick_line(pts, {48.0, 70.0}, {48.0, 110.0}, {-1.0, 0.0});
    thick_line(pts, {62.0, 70.0}, {62.0, 110.0}, {1.0, 0.0});
    thick_line(pts, {44.0, 110.0}, {66.0, 110.0}, {0.0, 1.0}); // cap
    return pts;
}

namespace {

Scenario make_scenario(std::string name, std::vector<Vec2> walls, const GoalSet& goal,
                       double start_qa, double qa_min, double qa_max)
{
    RobotParams params; // fixture robot: the defaults
    const double sp = straight_tendon_length(params, Segment::kProximal);
    const double sd = straight_tendon_length(params, Segment::kDistal);

    PlannerConfig pcfg;
    pcfg.q_min = Vec3(qa_min, sp - 8.0, sd - 8.0);
    pcfg.q_max = Vec3(qa_max, sp + 8.0, sd + 8.0);
    // contact thresholds scaled to the wall sampling density (the skin rows
    // are 0.35-0.5 mm apart, so sub-0.1 mm clearances would see a sieve)
    pcfg.gamma_ecs = 0.7;
    pcfg.gamma_contact = 0.45;

    MotionModelConfig mcfg;
    mcfg.gamma1 = 0.35;

    GridConfig gridcfg;
    gridcfg.extra_below = 5.0; // entry walls already extend below z = 0

    Scenario s{std::move(name),
               params,
               Environment(std::move(walls)),
               goal,
               JointConfig{start_qa, sp, sd},
               gridcfg,
               mcfg,
               pcfg,
               ControllerConfig{},
               PlantConfig{}};
    return s;
}

} // namespace

Scenario straight_scenario()
{
    Scenario s = make_scenario("straight", straight_walls(),
                               GoalSet{-3.0, 3.0, 120.0, 126.0, 0.3}, -110.0, -115.0, -10.0);
    // zero plant mismatch: the baseline sanity fixture
    return s;
}

Scenario lbend_scenario()
{
    Scenario s = make_scenario("lbend", lbend_walls(),
                               GoalSet{44.0, 50.0, 82.0, 88.0, 0.35}, -105.0, -110.0, 5.0);
    s.plantcfg.env_offset = Vec2(0.3, 0.4);
    s.plantcfg.gain = Vec3(1.0, 1.01, 1.01);
    s.plantcfg.noise_pos = 0.005;
    s.plantcfg.noise_phi = 0.002;
    return s;
}

Scenario sbend_scenario()
{
    Scenario s = make_scenario("sbend", sbend_walls(),
                               GoalSet{52.0, 58.0, 92.0, 98.0, 0.35}, -105.0, -110.0, 5.0);
    s.plantcfg.env_offset = Vec2(0.6, 0.8);
    s.plantcfg.gain = Vec3(1.0, 1.02, 1.02);
    s.plantcfg.noise_pos = 0.01;
    s.plantcfg.noise_phi = 0.003;
    return s;
}

void write_all(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (const Scenario& s : {straight_scenario(), lbend_scenario(), sbend_scenario()}) {
        write_environment_file(dir / (s.name + ".env"), s.env.points());
        write_scenario_file(dir / (s.name + ".scn"), s, s.name + ".env");
    }
}

} // namespace tendril::fixtures

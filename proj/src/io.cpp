#include <tendril/io.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

namespace tendril {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const std::string& text)
{
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(field, "not a number: '" + text + "'");
    }
    return v;
}

long parse_long(const std::string& field, const std::string& text)
{
    long v = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(field, "not an integer: '" + text + "'");
    }
    return v;
}

} // namespace

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

KeyValueFile KeyValueFile::parse_string(const std::string& text)
{
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno), "empty key");
        }
        if (!kv.values_.emplace(key, val).second) {
            throw ConfigError(key, "duplicate key");
        }
    }
    return kv;
}

bool KeyValueFile::has(const std::string& key) const
{
    return values_.count(key) != 0;
}

double KeyValueFile::get_double(const std::string& key)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(key, "missing required field");
    }
    consumed_.insert(key);
    return parse_double(key, it->second);
}

double KeyValueFile::get_double(const std::string& key, double fallback)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    consumed_.insert(key);
    return parse_double(key, it->second);
}

long KeyValueFile::get_long(const std::string& key, long fallback)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    consumed_.insert(key);
    return parse_long(key, it->second);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    consumed_.insert(key);
    const std::string& v = it->second;
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw ConfigError(key, "not a boolean: '" + v + "'");
}

std::string KeyValueFile::get_string(const std::string& key)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError(key, "missing required field");
    }
    consumed_.insert(key);
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback)
{
    auto it = values_.find(key);
    if (it == values_.end()) {
        return fallback;
    }
    consumed_.insert(key);
    return it->second;
}

void KeyValueFile::require_all_consumed() const
{
    for (const auto& [key, value] : values_) {
        if (!consumed_.count(key)) {
            throw ConfigError(key, "unknown field");
        }
    }
}

Scenario load_scenario(const std::filesystem::path& path)
{
    KeyValueFile kv = KeyValueFile::parse_file(path);

    const std::filesystem::path env_path =
        path.parent_path() / kv.get_string("env");
    if (!std::filesystem::exists(env_path)) {
        throw ConfigError("env", "environment file not found: " + env_path.string());
    }

    RobotParams params;
    params.m_p = static_cast<int>(kv.get_long("robot.m_p", params.m_p));
    params.m_d = static_cast<int>(kv.get_long("robot.m_d", params.m_d));
    params.l_p = kv.get_double("robot.l_p", params.l_p);
    params.l_d = kv.get_double("robot.l_d", params.l_d);
    params.c_p = kv.get_double("robot.c_p", params.c_p);
    params.c_d = kv.get_double("robot.c_d", params.c_d);
    params.l_s = kv.get_double("robot.l_s", params.l_s);
    params.r = kv.get_double("robot.r", params.r);
    try {
        params.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("robot", ex.what());
    }

    GoalSet goal;
    goal.x_min = kv.get_double("goal.x_min");
    goal.x_max = kv.get_double("goal.x_max");
    goal.z_min = kv.get_double("goal.z_min");
    goal.z_max = kv.get_double("goal.z_max");
    goal.phi_max = kv.get_double("goal.phi_max");
    try {
        goal.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("goal", ex.what());
    }

    JointConfig start;
    start.qa = kv.get_double("start.q_a");
    start.qp = kv.get_double("start.q_p");
    start.qd = kv.get_double("start.q_d");

    GridConfig gridcfg;
    gridcfg.cell_size = kv.get_double("grid.cell_size", gridcfg.cell_size);
    gridcfg.margin = kv.get_double("grid.margin", gridcfg.margin);
    gridcfg.extra_below = kv.get_double("grid.extra_below", gridcfg.extra_below);
    gridcfg.cell_cap =
        static_cast<std::size_t>(kv.get_long("grid.cell_cap", static_cast<long>(gridcfg.cell_cap)));
    gridcfg.c_app = kv.get_double("heuristic.c_app", 50.0 * gridcfg.cell_size);
    gridcfg.r_approach = kv.get_double("heuristic.r_approach", gridcfg.r_approach);

    MotionModelConfig mcfg;
    mcfg.gamma1 = kv.get_double("motion.gamma1", mcfg.gamma1);
    mcfg.kappa_max = kv.get_double("motion.kappa_max", mcfg.kappa_max);
    mcfg.max_iters = static_cast<int>(kv.get_long("motion.max_iters", mcfg.max_iters));
    mcfg.tol_eq = kv.get_double("motion.tol_eq", mcfg.tol_eq);
    mcfg.tol_obj = kv.get_double("motion.tol_obj", mcfg.tol_obj);
    mcfg.step_max = kv.get_double("motion.step_max", mcfg.step_max);
    mcfg.thin_radius = kv.get_double("motion.thin_radius", mcfg.thin_radius);

    PlannerConfig pcfg;
    pcfg.u_step[0] = kv.get_double("planner.u_step_a", pcfg.u_step[0]);
    pcfg.u_step[1] = kv.get_double("planner.u_step_p", pcfg.u_step[1]);
    pcfg.u_step[2] = kv.get_double("planner.u_step_d", pcfg.u_step[2]);
    pcfg.q_min[0] = kv.get_double("bounds.q_a_min");
    pcfg.q_max[0] = kv.get_double("bounds.q_a_max");
    pcfg.q_min[1] = kv.get_double("bounds.q_p_min");
    pcfg.q_max[1] = kv.get_double("bounds.q_p_max");
    pcfg.q_min[2] = kv.get_double("bounds.q_d_min");
    pcfg.q_max[2] = kv.get_double("bounds.q_d_max");
    pcfg.epsilon = kv.get_double("planner.epsilon", pcfg.epsilon);
    pcfg.c_a = kv.get_double("planner.c_a", pcfg.c_a);
    pcfg.c_p = kv.get_double("planner.c_p", pcfg.c_p);
    pcfg.c_d = kv.get_double("planner.c_d", pcfg.c_d);
    pcfg.C_d = kv.get_double("planner.contact_cost_tip", pcfg.C_d);
    pcfg.C_p = kv.get_double("planner.contact_cost_ecs", pcfg.C_p);
    pcfg.C_body = kv.get_double("planner.contact_cost_body", pcfg.C_body);
    pcfg.gamma_ecs = kv.get_double("planner.gamma_ecs", pcfg.gamma_ecs);
    pcfg.gamma_contact = kv.get_double("planner.gamma_contact", pcfg.gamma_contact);
    pcfg.expansion_cap = kv.get_long("planner.expansion_cap", pcfg.expansion_cap);
    pcfg.use_partition_actions =
        kv.get_bool("planner.use_partition_actions", pcfg.use_partition_actions);
    pcfg.use_cache = kv.get_bool("planner.use_cache", pcfg.use_cache);
    pcfg.allow_reexpansion = kv.get_bool("planner.allow_reexpansion", pcfg.allow_reexpansion);
    try {
        pcfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("planner", ex.what());
    }

    ControllerConfig ccfg;
    ccfg.beta = kv.get_double("controller.beta", ccfg.beta);
    ccfg.kp[0] = kv.get_double("controller.kp_x", ccfg.kp[0]);
    ccfg.kp[1] = kv.get_double("controller.kp_z", ccfg.kp[1]);
    ccfg.kp[2] = kv.get_double("controller.kp_phi", ccfg.kp[2]);
    ccfg.kd[0] = kv.get_double("controller.kd_x", ccfg.kd[0]);
    ccfg.kd[1] = kv.get_double("controller.kd_z", ccfg.kd[1]);
    ccfg.kd[2] = kv.get_double("controller.kd_phi", ccfg.kd[2]);
    ccfg.lambda = kv.get_double("controller.lambda", ccfg.lambda);
    ccfg.eps_pos = kv.get_double("controller.eps_pos", ccfg.eps_pos);
    ccfg.eps_phi = kv.get_double("controller.eps_phi", ccfg.eps_phi);
    ccfg.ticks_per_waypoint =
        static_cast<int>(kv.get_long("controller.ticks_per_waypoint", ccfg.ticks_per_waypoint));
    ccfg.u_clip = kv.get_double("controller.u_clip", ccfg.u_clip);
    try {
        ccfg.validate();
    } catch (const std::invalid_argument& ex) {
        throw ConfigError("controller", ex.what());
    }

    PlantConfig plantcfg;
    plantcfg.env_offset[0] = kv.get_double("plant.offset_x", 0.0);
    plantcfg.env_offset[1] = kv.get_double("plant.offset_z", 0.0);
    plantcfg.env_rotation = kv.get_double("plant.rotation", 0.0);
    plantcfg.gain[0] = kv.get_double("plant.gain_a", 1.0);
    plantcfg.gain[1] = kv.get_double("plant.gain_p", 1.0);
    plantcfg.gain[2] = kv.get_double("plant.gain_d", 1.0);
    plantcfg.noise_pos = kv.get_double("plant.noise_pos", 0.0);
    plantcfg.noise_phi = kv.get_double("plant.noise_phi", 0.0);
    plantcfg.seed = static_cast<std::uint64_t>(kv.get_long("plant.seed", 0));

    const std::string name = kv.get_string("name", path.stem().string());
    kv.require_all_consumed();

    return Scenario{name,    params, read_environment_file(env_path),
                    goal,    start,  gridcfg,
                    mcfg,    pcfg,   ccfg,
                    plantcfg};
}

void write_scenario_file(const std::filesystem::path& path, const Scenario& s,
                         const std::string& env_relpath)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    auto d = [&](const char* key, double v) { out << key << " = " << format_fixed(v) << "\n"; };
    out << "name = " << s.name << "\n";
    out << "env = " << env_relpath << "\n";
    out << "\n";
    out << "robot.m_p = " << s.params.m_p << "\n";
    out << "robot.m_d = " << s.params.m_d << "\n";
    d("robot.l_p", s.params.l_p);
    d("robot.l_d", s.params.l_d);
    d("robot.c_p", s.params.c_p);
    d("robot.c_d", s.params.c_d);
    d("robot.l_s", s.params.l_s);
    d("robot.r", s.params.r);
    out << "\n";
    d("goal.x_min", s.goal.x_min);
    d("goal.x_max", s.goal.x_max);
    d("goal.z_min", s.goal.z_min);
    d("goal.z_max", s.goal.z_max);
    d("goal.phi_max", s.goal.phi_max);
    out << "\n";
    d("start.q_a", s.start.qa);
    d("start.q_p", s.start.qp);
    d("start.q_d", s.start.qd);
    d("bounds.q_a_min", s.pcfg.q_min[0]);
    d("bounds.q_a_max", s.pcfg.q_max[0]);
    d("bounds.q_p_min", s.pcfg.q_min[1]);
    d("bounds.q_p_max", s.pcfg.q_max[1]);
    d("bounds.q_d_min", s.pcfg.q_min[2]);
    d("bounds.q_d_max", s.pcfg.q_max[2]);
    out << "\n";
    d("grid.cell_size", s.gridcfg.cell_size);
    d("grid.margin", s.gridcfg.margin);
    d("grid.extra_below", s.gridcfg.extra_below);
    out << "grid.cell_cap = " << s.gridcfg.cell_cap << "\n";
    d("heuristic.c_app", s.gridcfg.c_app);
    d("heuristic.r_approach", s.gridcfg.r_approach);
    out << "\n";
    d("motion.gamma1", s.mcfg.gamma1);
    d("motion.kappa_max", s.mcfg.kappa_max);
    out << "motion.max_iters = " << s.mcfg.max_iters << "\n";
    d("motion.tol_eq", s.mcfg.tol_eq);
    d("motion.tol_obj", s.mcfg.tol_obj);
    d("motion.step_max", s.mcfg.step_max);
    d("motion.thin_radius", s.mcfg.thin_radius);
    out << "\n";
    d("planner.u_step_a", s.pcfg.u_step[0]);
    d("planner.u_step_p", s.pcfg.u_step[1]);
    d("planner.u_step_d", s.pcfg.u_step[2]);
    d("planner.epsilon", s.pcfg.epsilon);
    d("planner.c_a", s.pcfg.c_a);
    d("planner.c_p", s.pcfg.c_p);
    d("planner.c_d", s.pcfg.c_d);
    d("planner.contact_cost_tip", s.pcfg.C_d);
    d("planner.contact_cost_ecs", s.pcfg.C_p);
    d("planner.contact_cost_body", s.pcfg.C_body);
    d("planner.gamma_ecs", s.pcfg.gamma_ecs);
    d("planner.gamma_contact", s.pcfg.gamma_contact);
    out << "planner.expansion_cap = " << s.pcfg.expansion_cap << "\n";
    out << "planner.use_partition_actions = " << (s.pcfg.use_partition_actions ? 1 : 0) << "\n";
    out << "planner.use_cache = " << (s.pcfg.use_cache ? 1 : 0) << "\n";
    out << "planner.allow_reexpansion = " << (s.pcfg.allow_reexpansion ? 1 : 0) << "\n";
    out << "\n";
    d("controller.beta", s.ccfg.beta);
    d("controller.kp_x", s.ccfg.kp[0]);
    d("controller.kp_z", s.ccfg.kp[1]);
    d("controller.kp_phi", s.ccfg.kp[2]);
    d("controller.kd_x", s.ccfg.kd[0]);
    d("controller.kd_z", s.ccfg.kd[1]);
    d("controller.kd_phi", s.ccfg.kd[2]);
    d("controller.lambda", s.ccfg.lambda);
    d("controller.eps_pos", s.ccfg.eps_pos);
    d("controller.eps_phi", s.ccfg.eps_phi);
    out << "controller.ticks_per_waypoint = " << s.ccfg.ticks_per_waypoint << "\n";
    d("controller.u_clip", s.ccfg.u_clip);
    out << "\n";
    d("plant.offset_x", s.plantcfg.env_offset[0]);
    d("plant.offset_z", s.plantcfg.env_offset[1]);
    d("plant.rotation", s.plantcfg.env_rotation);
    d("plant.gain_a", s.plantcfg.gain[0]);
    d("plant.gain_p", s.plantcfg.gain[1]);
    d("plant.gain_d", s.plantcfg.gain[2]);
    d("plant.noise_pos", s.plantcfg.noise_pos);
    d("plant.noise_phi", s.plantcfg.noise_phi);
    out << "plant.seed = " << s.plantcfg.seed << "\n";
}

WorkspaceFields build_fields(const Scenario& s)
{
    WorkspaceFields f{build_grid(s.env, s.gridcfg.cell_size, s.gridcfg.margin,
                                 s.gridcfg.extra_below, s.gridcfg.cell_cap),
                      {},
                      {}};
    f.parts = compute_partitions(f.grid, s.goal);
    f.heur = compute_heuristic(f.grid, s.goal, f.parts, s.gridcfg.c_app,
                               s.gridcfg.r_approach);
    return f;
}

std::string format_fixed(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    // normalize negative zero for byte-stable output
    if (std::string(buf) == "-0.000000000") {
        return "0.000000000";
    }
    return buf;
}

void write_environment_file(const std::filesystem::path& path,
                            const std::vector<Vec2>& points)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    out << "env-pc v1 " << points.size() << "\n";
    for (const Vec2& p : points) {
        out << format_fixed(p.x()) << " " << format_fixed(p.y()) << "\n";
    }
}

std::vector<Vec2> read_environment_points(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open environment file");
    }
    std::string magic, version;
    std::size_t n = 0;
    if (!(in >> magic >> version >> n) || magic != "env-pc" || version != "v1") {
        throw ConfigError(path.string(), "bad environment header (want 'env-pc v1 <N>')");
    }
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x, z;
        if (!(in >> x >> z)) {
            throw ConfigError(path.string(),
                              "truncated environment file at point " + std::to_string(i));
        }
        pts.emplace_back(x, z);
    }
    return pts;
}

Environment read_environment_file(const std::filesystem::path& path)
{
    return Environment(read_environment_points(path));
}

void write_plan_file(const std::filesystem::path& path, const PlanResult& plan)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    const std::size_t tau = plan.tau();
    out << "plan v1 tau=" << tau << "\n";
    for (std::size_t k = 0; k <= tau; ++k) {
        const JointConfig& q = plan.q_seq[k];
        const TipPose& p = plan.p_seq[k];
        const StepAnnotation& a = plan.contacts[k];
        out << "state " << k << " " << format_fixed(q.qa) << " " << format_fixed(q.qp)
            << " " << format_fixed(q.qd) << " " << format_fixed(p.x) << " "
            << format_fixed(p.z) << " " << format_fixed(p.phi) << " " << (a.tip_contact ? 1 : 0)
            << " " << (a.ecs_contact ? 1 : 0) << " " << (a.body_contact ? 1 : 0) << " "
            << a.n_contact << "\n";
        if (k < tau) {
            const ControlInput& u = plan.u_seq[k];
            const Mat3& J = plan.jacobian_seq.empty() ? Mat3::Zero().eval()
                                                      : plan.jacobian_seq[k];
            out << "input " << k << " " << format_fixed(u.dua) << " "
                << format_fixed(u.dup) << " " << format_fixed(u.dud);
            for (int row = 0; row < 3; ++row) {
                for (int col = 0; col < 3; ++col) {
                    out << " " << format_fixed(J(row, col));
                }
            }
            out << "\n";
        }
    }
    out << "footer cost=" << format_fixed(plan.total_cost) << " expands=" << plan.expansions
        << "\n";
}

PlanResult read_plan_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open plan file");
    }
    std::string magic, version, tau_field;
    if (!(in >> magic >> version >> tau_field) || magic != "plan" || version != "v1" ||
        tau_field.rfind("tau=", 0) != 0) {
        throw ConfigError(path.string(), "bad plan header (want 'plan v1 tau=<tau>')");
    }
    const std::size_t tau = std::stoul(tau_field.substr(4));

    PlanResult plan;
    plan.success = true;
    for (std::size_t k = 0; k <= tau; ++k) {
        std::string tag;
        std::size_t kk = 0;
        JointConfig q;
        TipPose p;
        StepAnnotation a;
        int tip = 0, ecs = 0, body = 0;
        if (!(in >> tag >> kk >> q.qa >> q.qp >> q.qd >> p.x >> p.z >> p.phi >> tip >>
              ecs >> body >> a.n_contact) ||
            tag != "state" || kk != k) {
            throw ConfigError(path.string(), "bad state record " + std::to_string(k));
        }
        a.tip_contact = tip != 0;
        a.ecs_contact = ecs != 0;
        a.body_contact = body != 0;
        plan.q_seq.push_back(q);
        plan.p_seq.push_back(p);
        plan.contacts.push_back(a);

        if (k < tau) {
            ControlInput u;
            Mat3 J;
            if (!(in >> tag >> kk >> u.dua >> u.dup >> u.dud) || tag != "input" || kk != k) {
                throw ConfigError(path.string(), "bad input record " + std::to_string(k));
            }
            for (int row = 0; row < 3; ++row) {
                for (int col = 0; col < 3; ++col) {
                    if (!(in >> J(row, col))) {
                        throw ConfigError(path.string(),
                                          "bad Jacobian record " + std::to_string(k));
                    }
                }
            }
            plan.u_seq.push_back(u);
            plan.jacobian_seq.push_back(J);
        }
    }

    std::string tag, cost_field, expands_field;
    if (!(in >> tag >> cost_field >> expands_field) || tag != "footer" ||
        cost_field.rfind("cost=", 0) != 0 || expands_field.rfind("expands=", 0) != 0) {
        throw ConfigError(path.string(), "bad plan footer");
    }
    plan.total_cost = parse_double("footer.cost", cost_field.substr(5));
    plan.expansions = parse_long("footer.expands", expands_field.substr(8));
    return plan;
}

void write_run_file(const std::filesystem::path& path, const TrackingRun& run)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    const std::size_t n = run.measured.size();
    out << "run v1 T=" << run.ticks << "\n";
    for (std::size_t t = 0; t < n; ++t) {
        const ControlInput u = (t < run.inputs.size()) ? run.inputs[t] : ControlInput::zero();
        out << "tick " << t << " " << run.waypoint[t] << " "
            << format_fixed(run.commanded[t].qa) << " " << format_fixed(run.commanded[t].qp)
            << " " << format_fixed(run.commanded[t].qd) << " " << format_fixed(u.dua) << " "
            << format_fixed(u.dup) << " " << format_fixed(u.dud) << " "
            << format_fixed(run.measured[t].x) << " " << format_fixed(run.measured[t].z)
            << " " << format_fixed(run.measured[t].phi) << " "
            << format_fixed(run.path_err[t]) << "\n";
    }
    out << "footer success=" << (run.success ? 1 : 0) << " mean_err=" << format_fixed(run.mean_err)
        << " ticks=" << run.ticks << " body_contact_steps=" << run.body_contact_steps
        << " tip_contact=" << (run.tip_contact ? 1 : 0)
        << " max_path_dist=" << format_fixed(run.max_path_dist) << "\n";
}

TrackingRun read_run_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open run file");
    }
    std::string magic, version, t_field;
    if (!(in >> magic >> version >> t_field) || magic != "run" || version != "v1" ||
        t_field.rfind("T=", 0) != 0) {
        throw ConfigError(path.string(), "bad run header (want 'run v1 T=<T>')");
    }
    const long ticks = parse_long("header.T", t_field.substr(2));

    TrackingRun run;
    for (long t = 0; t <= ticks; ++t) {
        std::string tag;
        long tt = 0;
        int k = 0;
        JointConfig q;
        ControlInput u;
        TipPose p;
        double e = 0.0;
        if (!(in >> tag >> tt >> k >> q.qa >> q.qp >> q.qd >> u.dua >> u.dup >> u.dud >>
              p.x >> p.z >> p.phi >> e) ||
            tag != "tick" || tt != t) {
            throw ConfigError(path.string(), "bad tick record " + std::to_string(t));
        }
        run.waypoint.push_back(k);
        run.commanded.push_back(q);
        if (t < ticks) {
            run.inputs.push_back(u);
        }
        run.measured.push_back(p);
        run.path_err.push_back(e);
    }

    std::string tag;
    if (!(in >> tag) || tag != "footer") {
        throw ConfigError(path.string(), "bad run footer");
    }
    std::string field;
    while (in >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string(), "bad footer field '" + field + "'");
        }
        const std::string key = field.substr(0, eq);
        const std::string val = field.substr(eq + 1);
        if (key == "success") {
            run.success = val == "1";
        } else if (key == "mean_err") {
            run.mean_err = parse_double(key, val);
        } else if (key == "ticks") {
            run.ticks = static_cast<int>(parse_long(key, val));
        } else if (key == "body_contact_steps") {
            run.body_contact_steps = static_cast<int>(parse_long(key, val));
        } else if (key == "tip_contact") {
            run.tip_contact = val == "1";
        } else if (key == "max_path_dist") {
            run.max_path_dist = parse_double(key, val);
        } else {
            throw ConfigError(path.string(), "unknown footer field '" + key + "'");
        }
    }
    return run;
}

void write_partition_file(const std::filesystem::path& path, const TaskGrid& grid,
                          const PartitionField& parts)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    out << "field v1 partition " << grid.width << " " << grid.height << " "
        << format_fixed(grid.origin.x()) << " " << format_fixed(grid.origin.y()) << " "
        << format_fixed(grid.cell_size) << "\n";
    for (int iz = 0; iz < grid.height; ++iz) {
        for (int ix = 0; ix < grid.width; ++ix) {
            out << (ix ? " " : "") << parts.at(ix, iz);
        }
        out << "\n";
    }
}

void write_heuristic_file(const std::filesystem::path& path, const TaskGrid& grid,
                          const HeuristicField& heur)
{
    std::ofstream out(path);
    if (!out) {
        throw ConfigError(path.string(), "cannot open for writing");
    }
    out << "field v1 heuristic " << grid.width << " " << grid.height << " "
        << format_fixed(grid.origin.x()) << " " << format_fixed(grid.origin.y()) << " "
        << format_fixed(grid.cell_size) << "\n";
    for (int iz = 0; iz < grid.height; ++iz) {
        for (int ix = 0; ix < grid.width; ++ix) {
            const double v = heur.at(ix, iz);
            out << (ix ? " " : "");
            if (std::isfinite(v)) {
                out << format_fixed(v);
            } else {
                out << "inf";
            }
        }
        out << "\n";
    }
}

int worker_count()
{
    const char* env = std::getenv("TENDRIL_THREADS");
    if (env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) {
            return static_cast<int>(v);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace tendril

#pragma once

#include <tendril/controller.hpp>
#include <tendril/environment.hpp>
#include <tendril/motion_model.hpp>
#include <tendril/planner.hpp>
#include <tendril/robot.hpp>
#include <tendril/workspace.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tendril {

/// Configuration or file-format error carrying the offending field/key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error("config error [" + field + "]: " + message),
          field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Flat key=value config file. '#' starts a comment; keys must be consumed
/// exactly once, and leftovers are reported as unknown keys.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::filesystem::path& path);
    static KeyValueFile parse_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key);
    double get_double(const std::string& key, double fallback);
    long get_long(const std::string& key, long fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key);
    std::string get_string(const std::string& key, const std::string& fallback);

    /// Throws ConfigError naming the first unconsumed key, if any.
    void require_all_consumed() const;

private:
    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
};

/// Workspace-field construction parameters carried by a scenario.
struct GridConfig {
    double cell_size = 1.0;
    double margin = 15.0;      // grid window beyond the environment bbox (mm)
    double extra_below = 30.0; // additional window below low z (entry region)
    std::size_t cell_cap = 4'000'000;
    double c_app = 50.0; // approach penalty (defaults to 50 * cell_size)
    double r_approach = 10.0;
};

/// Everything needed to run one planning/tracking task.
struct Scenario {
    std::string name;
    RobotParams params;
    Environment env;
    GoalSet goal;
    JointConfig start;
    GridConfig gridcfg;
    MotionModelConfig mcfg;
    PlannerConfig pcfg;
    ControllerConfig ccfg;
    PlantConfig plantcfg;
};

/// Parses a scenario file; the environment path is resolved relative to the
/// scenario file's directory. Throws ConfigError on malformed or unknown
/// fields and missing files.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes a scenario file with every key spelled out.
void write_scenario_file(const std::filesystem::path& path, const Scenario& s,
                         const std::string& env_relpath);

struct WorkspaceFields {
    TaskGrid grid;
    PartitionField parts;
    HeuristicField heur;
};

WorkspaceFields build_fields(const Scenario& s);

// Fixed 9-decimal formatting used by all file formats.
std::string format_fixed(double v);

// environment point-cloud file: header "env-pc v1 <N>", then N lines "x z"
void write_environment_file(const std::filesystem::path& path,
                            const std::vector<Vec2>& points);
std::vector<Vec2> read_environment_points(const std::filesystem::path& path);
Environment read_environment_file(const std::filesystem::path& path);

// plan file: header "plan v1 tau=<tau>", tau+1 state records interleaved
// with tau input records, footer with total cost and expansions
void write_plan_file(const std::filesystem::path& path, const PlanResult& plan);
PlanResult read_plan_file(const std::filesystem::path& path);

// tracking run file: header "run v1 T=<T>", one record per tick, footer with
// the summary metrics
void write_run_file(const std::filesystem::path& path, const TrackingRun& run);
TrackingRun read_run_file(const std::filesystem::path& path);

// plot-ready field exports: header then one row of values per grid row;
// unreachable cells print "-1" (partitions) or "inf" (heuristic)
void write_partition_file(const std::filesystem::path& path, const TaskGrid& grid,
                          const PartitionField& parts);
void write_heuristic_file(const std::filesystem::path& path, const TaskGrid& grid,
                          const HeuristicField& heur);

/// Worker-count cap from the TENDRIL_THREADS environment variable
/// (hardware concurrency when unset or invalid, at least 1).
int worker_count();

} // namespace tendril

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lrflow/cascade.hpp"
#include "lrflow/scenario.hpp"

namespace lrflow {

enum class Command { Simulate, Classify, Resilience, Allocate, Verify, ConstructTheorem1 };

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitInternal = 3;

std::string to_string(Command c);
/// Throws std::invalid_argument for unknown names.
Command command_from(std::string_view name);
std::vector<std::string> command_names();

struct RunOptions {
  std::filesystem::path out_dir;
  std::string scenario_name = "scenario.json";  // recorded in the summary
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<double> grid_step;
  std::optional<double> delta_budget;
};

struct RunSummary {
  nlohmann::ordered_json json;
  std::string text;
  std::vector<std::filesystem::path> files;  // written under out_dir
  int exit_code = kExitOk;
};

/// Executes one command and writes its artifacts: summary.json and
/// summary.txt always, plus trajectory/event CSVs, DOT graphs or derived
/// scenario files depending on the command. Output depends only on the
/// scenario and options. Throws ScenarioError when the scenario lacks what
/// the command needs.
RunSummary run_command(Command command, const Scenario& scenario, const RunOptions& options);

/// Trajectory CSV: header "t,edge,capacity,flow", one row per recorded state and edge.
std::string trajectory_csv(const Trajectory& traj);
/// Events CSV: header "t,edge,cause".
std::string events_csv(const std::vector<FailureEvent>& events);
/// Graphviz rendering of a state; edges that lost their capacity are dashed.
std::string limit_state_dot(const FlowNetwork& net, const CapacityVector& initial, const CapacityVector& c,
                            const FlowVector& f);

/// argv-level entry point used by the lrflow executable.
int cli_main(int argc, char** argv);

}  // namespace lrflow

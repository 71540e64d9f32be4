#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lrflow/netcore.hpp"
#include "lrflow/routing.hpp"

namespace lrflow {

inline constexpr int kScenarioSchemaVersion = 1;

/// Validation failure, prefixed with "<source>:<line>:" when the offending
/// value can be located in the file.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AllocationSpec {
  std::string objective;  // "minimal_reduction" | "robust_safety"
  std::optional<std::vector<double>> alpha;
};

struct Scenario {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;  // caller's node labels
  std::vector<double> capacities;
  std::map<int, double> inflow;  // origin label -> lambda
  std::string policy = "proportional";
  std::optional<int> horizon;
  std::string record = "full";  // "full" | "events"
  std::optional<std::uint64_t> seed;

  std::optional<double> grid_step;
  std::optional<std::string> resilience_mode;
  std::optional<AllocationSpec> allocation;
  std::optional<double> delta_budget;
  std::optional<int> trials;
  std::optional<int> theorem1_node;
  std::optional<double> theorem1_bump;
  std::optional<std::pair<std::vector<double>, std::vector<double>>> limit_state;  // (C*, f*)
};

/// Scenario plus the objects built from it. Node labels inside `network`
/// may differ from the file's; `lambda` is already in origin-slot order.
struct LoadedScenario {
  Scenario spec;
  FlowNetwork network;
  CapacityVector capacities;
  InflowVector lambda;
  RoutingPolicy policy;
};

Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(std::string_view text, std::string_view source = "<scenario>");

/// Builds the network and checks every cross-reference (inflow only at
/// origins, policy name, vector sizes). Throws ScenarioError.
LoadedScenario load_scenario(const Scenario& spec);

nlohmann::ordered_json scenario_to_json(const Scenario& spec);

/// Fixed 12-significant-digit rendering used by every output file.
std::string format_number(double x);
/// x rounded to 12 significant digits, for JSON output.
double round_significant(double x);

/// 1-based line of the value addressed by an RFC 6901 pointer, or 0 when it
/// cannot be found.
int locate_line(std::string_view text, std::string_view pointer);

}  // namespace lrflow

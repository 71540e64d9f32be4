#include "lrflow/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lrflow/allocate.hpp"
#include "lrflow/analysis.hpp"

namespace lrflow {

using ojson = nlohmann::ordered_json;

std::vector<std::string> command_names() {
  return {"simulate", "classify", "resilience", "allocate", "verify", "construct-theorem1"};
}

std::string to_string(Command c) {
  return command_names()[static_cast<std::size_t>(c)];
}

Command command_from(std::string_view name) {
  const auto names = command_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == name) return static_cast<Command>(k);
  }
  throw std::invalid_argument("unknown command '" + std::string(name) + "'");
}

namespace {

ojson number_array(const Vector<double>& x) {
  ojson arr = ojson::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) arr.push_back(round_significant(x[k]));
  return arr;
}

ojson inflow_object(const FlowNetwork& net, const InflowVector& lambda) {
  ojson obj = ojson::object();
  std::vector<std::pair<int, double>> entries;
  for (std::size_t k = 0; k < net.origins().size(); ++k) {
    entries.emplace_back(net.original_label(net.origins()[k]).value, lambda[static_cast<Eigen::Index>(k)]);
  }
  std::sort(entries.begin(), entries.end());
  for (auto [label, value] : entries) obj[std::to_string(label)] = round_significant(value);
  return obj;
}

// Per-node values keyed by the caller's labels, non-destinations only.
ojson node_object(const FlowNetwork& net, const Vector<double>& per_node) {
  std::vector<std::pair<int, double>> entries;
  for (NodeId v : net.nodes()) {
    if (!net.is_destination(v)) entries.emplace_back(net.original_label(v).value, per_node[v.index()]);
  }
  std::sort(entries.begin(), entries.end());
  ojson obj = ojson::object();
  for (auto [label, value] : entries) obj[std::to_string(label)] = round_significant(value);
  return obj;
}

std::string digest(const CapacityVector& c, const FlowVector& f) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  for (Eigen::Index k = 0; k < c.size(); ++k) mix(format_number(c[k]) + ";" + format_number(f[k]) + "|");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string render_text(const ojson& j, const std::string& indent = "") {
  std::ostringstream out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_object() && !it->empty()) {
      out << indent << it.key() << ":\n" << render_text(*it, indent + "  ");
    } else {
      out << indent << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
    }
  }
  return out.str();
}

class OutputDir {
 public:
  OutputDir(const std::filesystem::path& dir, RunSummary& summary) : dir_(dir), summary_(summary) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    summary_.files.push_back(path);
  }

 private:
  std::filesystem::path dir_;
  RunSummary& summary_;
};

SimulationOptions simulation_options(const Scenario& sc, const RunOptions& opts) {
  SimulationOptions so;
  so.horizon = opts.horizon ? opts.horizon : sc.horizon;
  so.recording = sc.record == "events" ? Recording::EventsOnly : Recording::Full;
  return so;
}

[[noreturn]] void mismatch(Command c, const std::string& what) {
  throw ScenarioError("command '" + to_string(c) + "' needs " + what);
}

ojson trajectory_json(const Trajectory& traj) {
  ojson j;
  j["verdict"] = to_token(traj.verdict);
  j["steps"] = traj.limit.t;
  j["failure_events"] = traj.events.size();
  j["limit_state_digest"] = digest(traj.limit.capacities, traj.limit.flows);
  j["limit_capacities"] = number_array(traj.limit.capacities);
  j["limit_flows"] = number_array(traj.limit.flows);
  return j;
}

void merge(ojson& into, const ojson& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = *it;
}

AllocationResult solve_scenario_allocation(const LoadedScenario& ls) {
  const AllocationSpec& spec = *ls.spec.allocation;
  AllocationObjective objective = RobustSafety{};
  if (spec.objective == "minimal_reduction") {
    CapacityVector alpha = CapacityVector::Ones(ls.network.edge_count());
    if (spec.alpha) alpha = Eigen::Map<const CapacityVector>(spec.alpha->data(), alpha.size());
    objective = MinimalReduction{alpha};
  }
  try {
    return solve_allocation(AllocationProblem(ls.network, ls.capacities, ls.lambda, objective));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("allocation: ") + e.what());
  }
}

Scenario with_capacities(Scenario sc, const CapacityVector& c) {
  sc.capacities.assign(c.data(), c.data() + c.size());
  sc.allocation.reset();
  sc.limit_state.reset();
  sc.theorem1_node.reset();
  sc.theorem1_bump.reset();
  return sc;
}

void run_simulate(const LoadedScenario& ls, const RunOptions& opts, ojson& j, OutputDir& out) {
  const Trajectory traj = simulate(ls.network, ls.policy, ls.lambda, ls.capacities, simulation_options(ls.spec, opts));
  merge(j, trajectory_json(traj));
  out.write("trajectory.csv", trajectory_csv(traj));
  out.write("events.csv", events_csv(traj.events));
  out.write("limit.dot", limit_state_dot(ls.network, ls.capacities, traj.limit.capacities, traj.limit.flows));
}

void run_classify(const LoadedScenario& ls, ojson& j, OutputDir& out) {
  if (!ls.spec.limit_state) mismatch(Command::Classify, "a limit_state block");
  const auto& [caps, flows] = *ls.spec.limit_state;
  const CapacityVector c_star = Eigen::Map<const CapacityVector>(caps.data(), static_cast<Eigen::Index>(caps.size()));
  const FlowVector f_star = Eigen::Map<const FlowVector>(flows.data(), static_cast<Eigen::Index>(flows.size()));
  const Verdict verdict = classify(ls.network, ls.lambda, c_star, f_star, ls.capacities);
  j["verdict"] = to_token(verdict);
  j["balanced_feasible"] = is_balanced_feasible(ls.network, ls.lambda, c_star, f_star);
  j["capacities_unchanged"] = c_star == ls.capacities;
  j["limit_state_digest"] = digest(c_star, f_star);
  out.write("limit.dot", limit_state_dot(ls.network, ls.capacities, c_star, f_star));
}

void run_resilience(const LoadedScenario& ls, const RunOptions& opts, ojson& j, OutputDir& out) {
  const auto step = opts.grid_step ? opts.grid_step : ls.spec.grid_step;
  if (!step) mismatch(Command::Resilience, "a grid step (--grid-step or resilience.grid_step)");
  const ResilienceMode mode = resilience_mode_from(ls.spec.resilience_mode.value_or("single_edge"));
  const ResilienceResult r = resilience_search(ls.network, ls.policy, ls.lambda, ls.capacities, *step, mode);

  ojson res;
  res["mode"] = to_token(mode);
  res["grid_step"] = round_significant(*step);
  res["found"] = r.found;
  res["value"] = r.found ? ojson(round_significant(r.value)) : ojson(nullptr);
  res["exact"] = r.exact;
  res["candidates"] = r.candidates;
  res["witness_delta"] = number_array(r.witness_delta);
  if (r.found) {
    SimulationOptions so = simulation_options(ls.spec, opts);
    const Trajectory witness =
        simulate(ls.network, ls.policy, ls.lambda, (ls.capacities - r.witness_delta).cwiseMax(0.0), so);
    res["witness_verdict"] = to_token(witness.verdict);
    out.write("witness_events.csv", events_csv(witness.events));
  }
  j["resilience"] = res;
}

void run_allocate(const LoadedScenario& ls, ojson& j, OutputDir& out) {
  if (!ls.spec.allocation) mismatch(Command::Allocate, "an allocation block");
  const AllocationResult r = solve_scenario_allocation(ls);
  ojson a;
  a["objective"] = ls.spec.allocation->objective;
  a["objective_value"] = round_significant(r.objective_value);
  a["capacities"] = number_array(r.capacities);
  a["node_excess"] = node_object(ls.network, r.node_excess);
  a["robust_margin"] = round_significant(-worst_node_excess(ls.network, r.capacities, ls.lambda));
  a["in_safe_set"] = in_safe_capacity_set(ls.network, r.capacities, ls.capacities, ls.lambda);
  a["lemma1_certificate"] = check_lemma1(ls.network, r.capacities, ls.lambda);
  j["allocation"] = a;
  out.write("allocated_scenario.json", scenario_to_json(with_capacities(ls.spec, r.capacities)).dump(2) + "\n");
}

int run_verify(const LoadedScenario& ls, const RunOptions& opts, ojson& j, OutputDir& out) {
  const auto seed = opts.seed ? opts.seed : ls.spec.seed;
  if (!seed) mismatch(Command::Verify, "an explicit seed (--seed or scenario seed)");
  const auto budget = opts.delta_budget ? opts.delta_budget : ls.spec.delta_budget;
  if (!budget) mismatch(Command::Verify, "a delta budget (--delta-budget or verify.delta_budget)");
  const int trials = ls.spec.trials.value_or(300);

  CapacityVector c = ls.capacities;
  if (ls.spec.allocation) c = solve_scenario_allocation(ls).capacities;
  const VerificationReport rep = verify_allocation(ls.network, c, ls.lambda, *budget, trials, *seed);

  ojson v;
  v["capacities"] = number_array(c);
  v["seed"] = *seed;
  v["trials"] = rep.trials;
  v["delta_budget"] = round_significant(rep.budget);
  v["robust_margin"] = round_significant(rep.margin);
  v["guaranteed"] = rep.guaranteed;
  v["violations"] = rep.violations.size();
  j["verify"] = v;

  std::ostringstream csv;
  csv << "trial,policy,verdict,certificate,lambda,delta\n";
  auto joined = [](const Vector<double>& x) {
    std::string s;
    for (Eigen::Index k = 0; k < x.size(); ++k) s += (k ? " " : "") + format_number(x[k]);
    return s;
  };
  for (const auto& viol : rep.violations) {
    csv << viol.trial << "," << (viol.policy.empty() ? "-" : viol.policy) << ","
        << (viol.policy.empty() ? "-" : to_token(viol.verdict)) << "," << (viol.certificate_holds ? "held" : "lost")
        << "," << joined(viol.lambda) << "," << joined(viol.delta) << "\n";
  }
  out.write("violations.csv", csv.str());
  return rep.passed() ? kExitOk : kExitViolation;
}

void run_theorem1(const LoadedScenario& ls, const RunOptions& opts, ojson& j, OutputDir& out) {
  if (!ls.spec.theorem1_node) mismatch(Command::ConstructTheorem1, "a theorem1 block naming the branching node");
  const NodeId v = ls.network.relabeled(NodeId{*ls.spec.theorem1_node});
  Theorem1Instance inst = [&] {
    try {
      return construct_theorem1_instance(ls.network, v, ls.lambda, ls.spec.theorem1_bump.value_or(1.0));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("theorem1: ") + e.what());
    }
  }();

  const SimulationOptions so = simulation_options(ls.spec, opts);
  const Trajectory base = simulate(ls.network, ls.policy, inst.lambda, inst.base, so);
  const Trajectory raised = simulate(ls.network, ls.policy, inst.lambda, inst.raised, so);

  ojson t;
  t["node"] = *ls.spec.theorem1_node;
  t["w"] = ls.network.original_label(inst.w).value;
  t["inflow"] = inflow_object(ls.network, inst.lambda);
  ojson b = trajectory_json(base);
  b["capacities"] = number_array(inst.base);
  ojson r = trajectory_json(raised);
  r["capacities"] = number_array(inst.raised);
  t["base"] = b;
  t["raised"] = r;
  j["theorem1"] = t;

  out.write("theorem1_base.json", scenario_to_json(with_capacities(ls.spec, inst.base)).dump(2) + "\n");
  out.write("theorem1_raised.json", scenario_to_json(with_capacities(ls.spec, inst.raised)).dump(2) + "\n");
  out.write("base_events.csv", events_csv(base.events));
  out.write("raised_events.csv", events_csv(raised.events));
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t,edge,capacity,flow\n";
  auto emit = [&](const CascadeState& s) {
    for (Eigen::Index e = 0; e < s.capacities.size(); ++e) {
      out << s.t << "," << e << "," << format_number(s.capacities[e]) << "," << format_number(s.flows[e]) << "\n";
    }
  };
  if (traj.states.empty()) {
    emit(traj.limit);
  } else {
    for (const auto& s : traj.states) emit(s);
  }
  return out.str();
}

std::string events_csv(const std::vector<FailureEvent>& events) {
  std::ostringstream out;
  out << "t,edge,cause\n";
  for (const auto& ev : events) out << ev.t << "," << ev.edge << "," << to_token(ev.cause) << "\n";
  return out.str();
}

std::string limit_state_dot(const FlowNetwork& net, const CapacityVector& initial, const CapacityVector& c,
                            const FlowVector& f) {
  std::ostringstream out;
  out << "digraph flow {\n  rankdir=LR;\n";
  for (NodeId v : net.nodes()) {
    const int label = net.original_label(v).value;
    out << "  n" << label << " [label=\"" << label << "\\n" << to_string(net.role(v)) << "\"];\n";
  }
  for (const Edge& e : net.edges()) {
    out << "  n" << net.original_label(e.tail).value << " -> n" << net.original_label(e.head).value;
    if (c[e.id] == 0.0 && initial[e.id] > 0.0) {
      out << " [label=\"e" << e.id << " failed\", style=dashed];\n";
    } else {
      out << " [label=\"e" << e.id << ": " << format_number(f[e.id]) << " | " << format_number(c[e.id]) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

RunSummary run_command(Command command, const Scenario& scenario, const RunOptions& options) {
  const LoadedScenario ls = load_scenario(scenario);
  RunSummary summary;
  OutputDir out(options.out_dir, summary);

  ojson j;
  j["command"] = to_string(command);
  j["scenario"] = options.scenario_name;
  j["policy"] = ls.policy.name();
  j["nodes"] = ls.network.node_count();
  j["edges"] = ls.network.edge_count();
  j["inflow"] = inflow_object(ls.network, ls.lambda);

  switch (command) {
    case Command::Simulate: run_simulate(ls, options, j, out); break;
    case Command::Classify: run_classify(ls, j, out); break;
    case Command::Resilience: run_resilience(ls, options, j, out); break;
    case Command::Allocate: run_allocate(ls, j, out); break;
    case Command::Verify: summary.exit_code = run_verify(ls, options, j, out); break;
    case Command::ConstructTheorem1: run_theorem1(ls, options, j, out); break;
  }

  summary.json = j;
  summary.text = render_text(j);
  out.write("summary.json", j.dump(2) + "\n");
  out.write("summary.txt", summary.text);
  return summary;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Cascading-failure analysis of locally routed acyclic flow networks"};
  std::string command;
  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int horizon = 0;
  double grid_step = 0.0;
  double delta_budget = 0.0;

  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(command_names()));
  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", out_dir, "Output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized commands");
  auto* horizon_opt = app.add_option("--horizon", horizon, "Simulation step limit")->check(CLI::PositiveNumber);
  auto* grid_opt = app.add_option("--grid-step", grid_step, "Resilience search grid step")->check(CLI::PositiveNumber);
  auto* budget_opt = app.add_option("--delta-budget", delta_budget, "Capacity-loss budget for verify")
                         ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  RunOptions opts;
  opts.out_dir = out_dir;
  opts.scenario_name = std::filesystem::path(scenario_path).filename().string();
  if (seed_opt->count()) opts.seed = seed;
  if (horizon_opt->count()) opts.horizon = horizon;
  if (grid_opt->count()) opts.grid_step = grid_step;
  if (budget_opt->count()) opts.delta_budget = delta_budget;

  const auto start = std::chrono::steady_clock::now();
  try {
    const Scenario sc = parse_scenario(scenario_path);
    const RunSummary summary = run_command(command_from(command), sc, opts);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    std::cout << summary.text << "wall_time_ms: " << format_number(elapsed.count()) << "\n";
    return summary.exit_code;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NetworkError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace lrflow

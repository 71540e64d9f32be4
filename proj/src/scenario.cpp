#include "lrflow/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace lrflow {

using nlohmann::json;

std::string format_number(double x) {
  if (x == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round_significant(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

// ---------------------------------------------------------------------------
// Pointer-to-line lookup over raw JSON text.

namespace {

class LineLocator {
 public:
  explicit LineLocator(std::string_view text) : s_(text) {}

  int find(const std::vector<std::string>& tokens) {
    pos_ = 0;
    skip_ws();
    if (!seek(tokens, 0)) return 0;
    int line = 1;
    for (std::size_t k = 0; k < pos_ && k < s_.size(); ++k) line += s_[k] == '\n';
    return line;
  }

 private:
  bool seek(const std::vector<std::string>& tokens, std::size_t depth) {
    if (depth == tokens.size()) return true;
    if (pos_ >= s_.size()) return false;
    if (s_[pos_] == '{') {
      ++pos_;
      for (;;) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] == '}') return false;
        const std::string key = read_string();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ':') ++pos_;
        skip_ws();
        if (key == tokens[depth]) return seek(tokens, depth + 1);
        if (!skip_value()) return false;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
    }
    if (s_[pos_] == '[') {
      char* end = nullptr;
      const long want = std::strtol(tokens[depth].c_str(), &end, 10);
      if (end == tokens[depth].c_str() || *end != '\0') return false;
      ++pos_;
      for (long idx = 0;; ++idx) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] == ']') return false;
        if (idx == want) return seek(tokens, depth + 1);
        if (!skip_value()) return false;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string read_string() {
    std::string out;
    if (pos_ >= s_.size() || s_[pos_] != '"') return out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out.push_back(s_[pos_++]);
    }
    ++pos_;
    return out;
  }

  bool skip_value() {
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    if (c == '"') {
      read_string();
      return true;
    }
    if (c == '{' || c == '[') {
      const char close = c == '{' ? '}' : ']';
      ++pos_;
      for (;;) {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        if (s_[pos_] == close) {
          ++pos_;
          return true;
        }
        if (c == '{') {
          read_string();
          skip_ws();
          if (pos_ < s_.size() && s_[pos_] == ':') ++pos_;
          skip_ws();
        }
        if (!skip_value()) return false;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      }
    }
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}' && s_[pos_] != ']' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    return true;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

int locate_line(std::string_view text, std::string_view pointer) {
  std::vector<std::string> tokens;
  if (!pointer.empty()) {
    std::string current;
    for (std::size_t k = 1; k <= pointer.size(); ++k) {
      if (k == pointer.size() || pointer[k] == '/') {
        std::string unescaped;
        for (std::size_t j = 0; j < current.size(); ++j) {
          if (current[j] == '~' && j + 1 < current.size()) {
            unescaped.push_back(current[j + 1] == '1' ? '/' : '~');
            ++j;
          } else {
            unescaped.push_back(current[j]);
          }
        }
        tokens.push_back(unescaped);
        current.clear();
      } else {
        current.push_back(pointer[k]);
      }
    }
  }
  return LineLocator(text).find(tokens);
}

// ---------------------------------------------------------------------------
// Parsing and validation.

namespace {

class Validator {
 public:
  Validator(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::string where(source_);
    const int line = text_.empty() ? 0 : locate_line(text_, pointer);
    if (line > 0) where += ":" + std::to_string(line);
    throw ScenarioError(where + ": " + (pointer.empty() ? "/" : pointer) + ": " + message);
  }

  const json& require(const json& obj, const std::string& ptr, const char* key) const {
    if (!obj.contains(key)) fail(ptr, std::string("missing required field '") + key + "'");
    return obj.at(key);
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    return v.get<double>();
  }

  double nonnegative(const json& v, const std::string& ptr) const {
    const double x = number(v, ptr);
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ptr, "must be a finite nonnegative number, got " + v.dump());
    return x;
  }

  long long integer(const json& v, const std::string& ptr) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<long long>();
  }

  std::string string(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(ptr + "/" + k, "unknown field '" + k + "'");
    }
  }

  std::vector<double> edge_vector(const json& v, const std::string& ptr, std::size_t edges) const {
    if (!v.is_array()) fail(ptr, "expected an array");
    if (v.size() != edges) {
      fail(ptr, "expected " + std::to_string(edges) + " entries (one per edge), got " + std::to_string(v.size()));
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(nonnegative(v[k], ptr + "/" + std::to_string(k)));
    return out;
  }

 private:
  std::string_view text_;
  std::string_view source_;
};

Scenario parse_document(const json& doc, const Validator& check) {
  check.only_keys(doc, "", {"schema_version", "nodes", "edges", "inflow", "policy", "horizon", "record", "seed",
                            "resilience", "allocation", "verify", "theorem1", "limit_state"});
  Scenario sc;

  const long long version = check.integer(check.require(doc, "", "schema_version"), "/schema_version");
  if (version != kScenarioSchemaVersion) {
    check.fail("/schema_version", "unsupported schema version " + std::to_string(version) + " (expected " +
                                      std::to_string(kScenarioSchemaVersion) + ")");
  }

  const long long nodes = check.integer(check.require(doc, "", "nodes"), "/nodes");
  if (nodes < 2) check.fail("/nodes", "a network needs at least two nodes");
  sc.node_count = static_cast<int>(nodes);

  const json& edges = check.require(doc, "", "edges");
  if (!edges.is_array() || edges.empty()) check.fail("/edges", "expected a nonempty array of edges");
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ptr = "/edges/" + std::to_string(k);
    check.only_keys(edges[k], ptr, {"tail", "head", "capacity"});
    const long long tail = check.integer(check.require(edges[k], ptr, "tail"), ptr + "/tail");
    const long long head = check.integer(check.require(edges[k], ptr, "head"), ptr + "/head");
    const std::string name = "edge " + std::to_string(k) + " (" + std::to_string(tail) + "->" + std::to_string(head) + ")";
    for (auto [label, end] : {std::pair{tail, "/tail"}, std::pair{head, "/head"}}) {
      if (label < 1 || label > nodes) {
        check.fail(ptr + end, name + " references node " + std::to_string(label) + " outside 1.." + std::to_string(nodes));
      }
    }
    const json& cap = check.require(edges[k], ptr, "capacity");
    const double c = check.number(cap, ptr + "/capacity");
    if (!(c >= 0.0) || !std::isfinite(c)) check.fail(ptr + "/capacity", name + " has negative capacity " + cap.dump());
    sc.edges.emplace_back(static_cast<int>(tail), static_cast<int>(head));
    sc.capacities.push_back(c);
  }

  if (doc.contains("inflow")) {
    const json& inflow = doc.at("inflow");
    if (!inflow.is_object()) check.fail("/inflow", "expected an object mapping origin labels to inflows");
    for (const auto& [key, value] : inflow.items()) {
      char* end = nullptr;
      const long label = std::strtol(key.c_str(), &end, 10);
      if (end == key.c_str() || *end != '\0' || label < 1 || label > nodes) {
        check.fail("/inflow/" + key, "'" + key + "' is not a node label in 1.." + std::to_string(nodes));
      }
      sc.inflow[static_cast<int>(label)] = check.nonnegative(value, "/inflow/" + key);
    }
  }

  if (doc.contains("policy")) {
    sc.policy = check.string(doc.at("policy"), "/policy");
    try {
      policy_by_name(sc.policy);
    } catch (const std::invalid_argument& e) {
      check.fail("/policy", e.what());
    }
  }

  if (doc.contains("horizon")) {
    const json& h = doc.at("horizon");
    if (!(h.is_string() && h.get<std::string>() == "auto")) {
      const long long steps = check.integer(h, "/horizon");
      if (steps < 1) check.fail("/horizon", "horizon must be positive or \"auto\"");
      sc.horizon = static_cast<int>(steps);
    }
  }

  if (doc.contains("record")) {
    sc.record = check.string(doc.at("record"), "/record");
    if (sc.record != "full" && sc.record != "events") check.fail("/record", "expected \"full\" or \"events\"");
  }

  if (doc.contains("seed")) {
    const long long seed = check.integer(doc.at("seed"), "/seed");
    if (seed < 0) check.fail("/seed", "seed must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.contains("resilience")) {
    const json& r = doc.at("resilience");
    check.only_keys(r, "/resilience", {"grid_step", "mode"});
    if (r.contains("grid_step")) {
      const double step = check.number(r.at("grid_step"), "/resilience/grid_step");
      if (!(step > 0.0)) check.fail("/resilience/grid_step", "grid_step must be positive");
      sc.grid_step = step;
    }
    if (r.contains("mode")) {
      sc.resilience_mode = check.string(r.at("mode"), "/resilience/mode");
      if (*sc.resilience_mode != "single_edge" && *sc.resilience_mode != "per_node" &&
          *sc.resilience_mode != "full_grid") {
        check.fail("/resilience/mode", "unknown mode (valid: single_edge, per_node, full_grid)");
      }
    }
  }

  if (doc.contains("allocation")) {
    const json& a = doc.at("allocation");
    check.only_keys(a, "/allocation", {"objective", "alpha"});
    AllocationSpec spec;
    spec.objective = check.string(check.require(a, "/allocation", "objective"), "/allocation/objective");
    if (spec.objective != "minimal_reduction" && spec.objective != "robust_safety") {
      check.fail("/allocation/objective", "unknown objective (valid: minimal_reduction, robust_safety)");
    }
    if (a.contains("alpha")) spec.alpha = check.edge_vector(a.at("alpha"), "/allocation/alpha", sc.edges.size());
    sc.allocation = spec;
  }

  if (doc.contains("verify")) {
    const json& v = doc.at("verify");
    check.only_keys(v, "/verify", {"delta_budget", "trials"});
    if (v.contains("delta_budget")) sc.delta_budget = check.nonnegative(v.at("delta_budget"), "/verify/delta_budget");
    if (v.contains("trials")) {
      const long long trials = check.integer(v.at("trials"), "/verify/trials");
      if (trials < 1) check.fail("/verify/trials", "trials must be positive");
      sc.trials = static_cast<int>(trials);
    }
  }

  if (doc.contains("theorem1")) {
    const json& t = doc.at("theorem1");
    check.only_keys(t, "/theorem1", {"node", "bump"});
    const long long node = check.integer(check.require(t, "/theorem1", "node"), "/theorem1/node");
    if (node < 1 || node > nodes) check.fail("/theorem1/node", "node outside 1.." + std::to_string(nodes));
    sc.theorem1_node = static_cast<int>(node);
    if (t.contains("bump")) {
      const double bump = check.number(t.at("bump"), "/theorem1/bump");
      if (!(bump > 0.0)) check.fail("/theorem1/bump", "bump must be positive");
      sc.theorem1_bump = bump;
    }
  }

  if (doc.contains("limit_state")) {
    const json& l = doc.at("limit_state");
    check.only_keys(l, "/limit_state", {"capacities", "flows"});
    auto caps = check.edge_vector(check.require(l, "/limit_state", "capacities"), "/limit_state/capacities",
                                  sc.edges.size());
    auto flows = check.edge_vector(check.require(l, "/limit_state", "flows"), "/limit_state/flows", sc.edges.size());
    sc.limit_state = std::pair{std::move(caps), std::move(flows)};
  }
  return sc;
}

LoadedScenario build(const Scenario& spec, const Validator& check) {
  FlowNetwork net = [&] {
    try {
      return build_network(spec.node_count, spec.edges);
    } catch (const NetworkError& e) {
      check.fail("/edges", e.what());
    }
  }();

  InflowVector lambda = InflowVector::Zero(static_cast<Eigen::Index>(net.origins().size()));
  for (const auto& [label, value] : spec.inflow) {
    if (label < 1 || label > spec.node_count) check.fail("/inflow/" + std::to_string(label), "unknown node");
    const NodeId v = net.relabeled(NodeId{label});
    if (!net.is_origin(v)) {
      check.fail("/inflow/" + std::to_string(label),
                 "node " + std::to_string(label) + " is " + to_string(net.role(v)) + ", inflow is only allowed at origins");
    }
    if (value < 0.0) check.fail("/inflow/" + std::to_string(label), "inflow must be nonnegative");
    lambda[net.origin_slot(v)] = value;
  }

  if (spec.capacities.size() != spec.edges.size()) check.fail("/edges", "capacity count does not match edge count");
  CapacityVector caps(static_cast<Eigen::Index>(spec.capacities.size()));
  for (std::size_t k = 0; k < spec.capacities.size(); ++k) {
    if (spec.capacities[k] < 0.0) {
      check.fail("/edges/" + std::to_string(k) + "/capacity", "edge " + std::to_string(k) + " has negative capacity");
    }
    caps[static_cast<Eigen::Index>(k)] = spec.capacities[k];
  }

  RoutingPolicy policy = [&] {
    try {
      return policy_by_name(spec.policy);
    } catch (const std::invalid_argument& e) {
      check.fail("/policy", e.what());
    }
  }();

  if (spec.theorem1_node && (*spec.theorem1_node < 1 || *spec.theorem1_node > spec.node_count)) {
    check.fail("/theorem1/node", "unknown node");
  }
  return LoadedScenario{spec, std::move(net), std::move(caps), std::move(lambda), std::move(policy)};
}

}  // namespace

Scenario parse_scenario_text(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ScenarioError(std::string(source) + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  Validator check(text, source);
  Scenario sc = parse_document(doc, check);
  build(sc, check);  // cross-reference checks with line numbers
  return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

LoadedScenario load_scenario(const Scenario& spec) {
  return build(spec, Validator("", "<scenario>"));
}

nlohmann::ordered_json scenario_to_json(const Scenario& spec) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["nodes"] = spec.node_count;
  doc["edges"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    nlohmann::ordered_json e;
    e["tail"] = spec.edges[k].first;
    e["head"] = spec.edges[k].second;
    e["capacity"] = round_significant(spec.capacities[k]);
    doc["edges"].push_back(e);
  }
  doc["inflow"] = nlohmann::ordered_json::object();
  for (const auto& [label, value] : spec.inflow) doc["inflow"][std::to_string(label)] = round_significant(value);
  doc["policy"] = spec.policy;
  if (spec.horizon) doc["horizon"] = *spec.horizon;
  if (spec.record != "full") doc["record"] = spec.record;
  if (spec.seed) doc["seed"] = *spec.seed;
  if (spec.grid_step || spec.resilience_mode) {
    auto& r = doc["resilience"];
    if (spec.grid_step) r["grid_step"] = *spec.grid_step;
    if (spec.resilience_mode) r["mode"] = *spec.resilience_mode;
  }
  if (spec.allocation) {
    auto& a = doc["allocation"];
    a["objective"] = spec.allocation->objective;
    if (spec.allocation->alpha) a["alpha"] = *spec.allocation->alpha;
  }
  if (spec.delta_budget || spec.trials) {
    auto& v = doc["verify"];
    if (spec.delta_budget) v["delta_budget"] = *spec.delta_budget;
    if (spec.trials) v["trials"] = *spec.trials;
  }
  if (spec.theorem1_node) {
    doc["theorem1"]["node"] = *spec.theorem1_node;
    if (spec.theorem1_bump) doc["theorem1"]["bump"] = *spec.theorem1_bump;
  }
  if (spec.limit_state) {
    nlohmann::ordered_json caps = nlohmann::ordered_json::array();
    nlohmann::ordered_json flows = nlohmann::ordered_json::array();
    for (double c : spec.limit_state->first) caps.push_back(round_significant(c));
    for (double f : spec.limit_state->second) flows.push_back(round_significant(f));
    doc["limit_state"]["capacities"] = caps;
    doc["limit_state"]["flows"] = flows;
  }
  return doc;
}

}  // namespace lrflow

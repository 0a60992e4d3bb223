#include "granusim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "granusim/error.hpp"

namespace granusim {

std::array<NetworkSpec, kNetworkCount> default_networks() {
  return {{
      {NetworkId::Water, 22, 77, default_params(NetworkId::Water)},
      {NetworkId::Power, 21, 77, default_params(NetworkId::Power)},
      {NetworkId::Business, 20, 75, default_params(NetworkId::Business)},
  }};
}

void FactorLevels::validate(std::size_t origin_nodes) const {
  auto ascending_positive = [](const auto& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string("levels.") + name + ": must not be empty");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (v[k] < 1) throw ConfigError(std::string("levels.") + name + ": levels must be positive");
      if (k > 0 && v[k - 1] >= v[k])
        throw ConfigError(std::string("levels.") + name + ": levels must be strictly ascending");
    }
  };
  ascending_positive(tg, "tg");
  ascending_positive(rt, "rt");
  ascending_positive(ds, "ds");
  if (static_cast<std::size_t>(ds.back()) > origin_nodes)
    throw ConfigError("levels.ds: level exceeds origin network node count");
}

const NetworkSpec& ScenarioConfig::spec(NetworkId network) const {
  return networks[index_of(network)];
}

Timestep ScenarioConfig::disruption_start() const noexcept {
  if (!align_sync || factors.tg <= 0) return warmup;
  return (warmup + factors.tg - 1) / factors.tg * factors.tg;
}

void ScenarioConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon: must be positive");
  if (warmup < 1) throw ConfigError("warmup: must be positive");
  if (recovery_headroom < 0) throw ConfigError("recovery_headroom: must be nonnegative");
  if (couplings_per_node < 1) throw ConfigError("couplings_per_node: must be positive");
  for (std::size_t k = 0; k < kNetworkCount; ++k) {
    const NetworkSpec& s = networks[k];
    const std::string where = "networks[" + std::to_string(k) + "]";
    if (s.network != kAllNetworks[k]) throw ConfigError(where + ".network: out of order");
    if (s.nodes < 1) throw ConfigError(where + ".nodes: must be positive");
    if (s.edges > max_directed_edges(s.nodes))
      throw ConfigError(where + ".edges: exceeds distinct non-loop edges for node count");
    try {
      s.params.validate();
    } catch (const ConfigError& ex) {
      throw ConfigError(where + ": " + ex.what());
    }
  }
  if (origin == target) throw ConfigError("target: must differ from origin");
  if (factors.tg < 1) throw ConfigError("factors.tg: must be positive");
  if (factors.rt < 1) throw ConfigError("factors.rt: must be positive");
  if (factors.ds < 1 || static_cast<std::size_t>(factors.ds) > spec(origin).nodes)
    throw ConfigError("factors.ds: must lie in [1, origin node count]");
  levels.validate(spec(origin).nodes);
  if (mode == DisruptionMode::Fixed &&
      horizon < disruption_start() + factors.rt + recovery_headroom) {
    throw ConfigError("horizon: must be >= disruption start + rt + recovery_headroom (" +
                      std::to_string(disruption_start() + factors.rt + recovery_headroom) + ")");
  }
}

namespace {

std::string_view mode_name(DisruptionMode mode) {
  switch (mode) {
    case DisruptionMode::Fixed: return "fixed";
    case DisruptionMode::Poisson: return "poisson";
    case DisruptionMode::Explicit: return "explicit";
  }
  return "fixed";
}

DisruptionMode parse_mode(const std::string& name) {
  if (name == "fixed") return DisruptionMode::Fixed;
  if (name == "poisson") return DisruptionMode::Poisson;
  if (name == "explicit") return DisruptionMode::Explicit;
  throw ConfigError("disruption.mode: expected fixed, poisson or explicit");
}

// Reads one field, reporting its path on a type mismatch.
template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out, const std::string& path) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + key + ": wrong type (" + obj.at(key).dump() + ")");
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> known,
                    const std::string& path) {
  if (!obj.is_object()) throw ConfigError((path.empty() ? "scenario" : path) + ": expected an object");
  const std::set<std::string> keys(known.begin(), known.end());
  for (const auto& item : obj.items()) {
    if (!keys.contains(item.key())) throw ConfigError(path + item.key() + ": unknown field");
  }
}

}  // namespace

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json networks = nlohmann::json::array();
  for (const NetworkSpec& s : c.networks) {
    networks.push_back({
        {"network", to_string(s.network)},
        {"nodes", s.nodes},
        {"edges", s.edges},
        {"lag", s.params.lag},
        {"weights",
         {{"internal", s.params.weights.internal},
          {"in_network", s.params.weights.in_network},
          {"external", s.params.weights.external}}},
    });
  }
  nlohmann::json events = nlohmann::json::array();
  for (const DisruptionEvent& ev : c.events) events.push_back(to_json(ev));
  return {
      {"master_seed", c.master_seed},
      {"horizon", c.horizon},
      {"warmup", c.warmup},
      {"recovery_headroom", c.recovery_headroom},
      {"couplings_per_node", c.couplings_per_node},
      {"align_sync", c.align_sync},
      {"origin", to_string(c.origin)},
      {"target", to_string(c.target)},
      {"factors", {{"tg", c.factors.tg}, {"rt", c.factors.rt}, {"ds", c.factors.ds}}},
      {"levels", {{"tg", c.levels.tg}, {"rt", c.levels.rt}, {"ds", c.levels.ds}}},
      {"networks", std::move(networks)},
      {"disruption",
       {{"mode", mode_name(c.mode)},
        {"rate", c.poisson.rate},
        {"min_size", c.poisson.min_size},
        {"max_size", c.poisson.max_size},
        {"min_recovery", c.poisson.min_recovery},
        {"max_recovery", c.poisson.max_recovery},
        {"events", std::move(events)}}},
  };
}

ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  ScenarioConfig c;
  reject_unknown(doc,
                 {"master_seed", "horizon", "warmup", "recovery_headroom", "couplings_per_node",
                  "align_sync", "origin", "target", "factors", "levels", "networks", "disruption"},
                 "");
  read_field(doc, "master_seed", c.master_seed, "");
  read_field(doc, "horizon", c.horizon, "");
  read_field(doc, "warmup", c.warmup, "");
  read_field(doc, "recovery_headroom", c.recovery_headroom, "");
  read_field(doc, "couplings_per_node", c.couplings_per_node, "");
  read_field(doc, "align_sync", c.align_sync, "");
  std::string name;
  if (doc.contains("origin")) {
    read_field(doc, "origin", name, "");
    c.origin = parse_network(name);
  }
  if (doc.contains("target")) {
    read_field(doc, "target", name, "");
    c.target = parse_network(name);
  }
  if (doc.contains("factors")) {
    const auto& f = doc.at("factors");
    reject_unknown(f, {"tg", "rt", "ds"}, "factors.");
    read_field(f, "tg", c.factors.tg, "factors.");
    read_field(f, "rt", c.factors.rt, "factors.");
    read_field(f, "ds", c.factors.ds, "factors.");
  }
  if (doc.contains("levels")) {
    const auto& l = doc.at("levels");
    reject_unknown(l, {"tg", "rt", "ds"}, "levels.");
    read_field(l, "tg", c.levels.tg, "levels.");
    read_field(l, "rt", c.levels.rt, "levels.");
    read_field(l, "ds", c.levels.ds, "levels.");
  }
  if (doc.contains("networks")) {
    const auto& arr = doc.at("networks");
    if (!arr.is_array()) throw ConfigError("networks: expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string path = "networks[" + std::to_string(k) + "].";
      const auto& n = arr[k];
      reject_unknown(n, {"network", "nodes", "edges", "lag", "weights"}, path);
      if (!n.contains("network")) throw ConfigError(path + "network: required");
      read_field(n, "network", name, path);
      NetworkSpec& s = c.networks[index_of(parse_network(name))];
      read_field(n, "nodes", s.nodes, path);
      read_field(n, "edges", s.edges, path);
      read_field(n, "lag", s.params.lag, path);
      if (n.contains("weights")) {
        const auto& w = n.at("weights");
        const std::string wpath = path + "weights.";
        reject_unknown(w, {"internal", "in_network", "external"}, wpath);
        read_field(w, "internal", s.params.weights.internal, wpath);
        read_field(w, "in_network", s.params.weights.in_network, wpath);
        read_field(w, "external", s.params.weights.external, wpath);
      }
    }
  }
  if (doc.contains("disruption")) {
    const auto& d = doc.at("disruption");
    const std::string path = "disruption.";
    reject_unknown(d, {"mode", "rate", "min_size", "max_size", "min_recovery", "max_recovery", "events"},
                   path);
    if (d.contains("mode")) {
      read_field(d, "mode", name, path);
      c.mode = parse_mode(name);
    }
    read_field(d, "rate", c.poisson.rate, path);
    read_field(d, "min_size", c.poisson.min_size, path);
    read_field(d, "max_size", c.poisson.max_size, path);
    read_field(d, "min_recovery", c.poisson.min_recovery, path);
    read_field(d, "max_recovery", c.poisson.max_recovery, path);
    if (d.contains("events")) {
      const auto& evs = d.at("events");
      if (!evs.is_array()) throw ConfigError("disruption.events: expected an array");
      for (std::size_t k = 0; k < evs.size(); ++k) {
        try {
          c.events.push_back(event_from_json(evs[k]));
        } catch (const ConfigError& ex) {
          throw ConfigError("disruption.events[" + std::to_string(k) + "]: " + ex.what());
        }
      }
    }
  }
  c.poisson.horizon = c.horizon;
  c.validate();
  return c;
}

ScenarioConfig parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    // Translate the byte offset into a line/column position.
    const std::size_t offset = std::min<std::size_t>(ex.byte == 0 ? 0 : ex.byte - 1, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(
                                     std::count(text.begin(), text.begin() + offset, '\n'));
    const std::size_t last_nl = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const std::size_t column = last_nl == std::string::npos ? offset + 1 : offset - last_nl;
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": malformed scenario (" + ex.what() + ")");
  }
  return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ConfigError& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
}

}  // namespace granusim

#include "granusim/disruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "granusim/error.hpp"
#include "granusim/rng.hpp"

namespace granusim {

void DisruptionEvent::validate(const Topology& topology, Timestep horizon) const {
  if (target != topology.network) throw PreconditionError("event targets a different network");
  if (apply_time < 1) throw PreconditionError("event apply_time must be >= 1");
  if (retract_time <= apply_time) throw PreconditionError("event must last at least one timestep");
  if (retract_time > horizon) throw PreconditionError("event retract_time beyond horizon");
  if (nodes.empty()) throw PreconditionError("event node set is empty");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k] >= topology.node_count) throw PreconditionError("event node out of range");
    if (k > 0 && nodes[k - 1] >= nodes[k])
      throw PreconditionError("event nodes must be sorted and distinct");
  }
}

std::vector<NodeIndex> fixed_pattern(std::size_t ds, const Topology& topology, std::uint64_t seed) {
  if (ds == 0) throw PreconditionError("disruption size must be at least 1");
  if (ds > topology.node_count) {
    throw SizeOverflow("disruption size " + std::to_string(ds) + " exceeds the " +
                       std::to_string(topology.node_count) + " nodes of the " +
                       std::string(to_string(topology.network)) + " network");
  }
  std::vector<NodeIndex> perm(topology.node_count);
  std::iota(perm.begin(), perm.end(), NodeIndex{0});
  Engine engine(seed);
  // Partial Fisher-Yates; the first ds slots do not depend on ds itself.
  for (std::size_t i = 0; i < ds; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(engine, perm.size() - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(ds);
  std::sort(perm.begin(), perm.end());
  return perm;
}

std::uint64_t pattern_hash(const std::vector<NodeIndex>& nodes) {
  Fnv1a h;
  h.add(nodes.size());
  for (NodeIndex v : nodes) h.add(v);
  return h.value();
}

void DisruptionStreamConfig::validate(const Topology& topology) const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw PreconditionError("stream rate must be positive");
  if (min_size == 0 || min_size > max_size || max_size > topology.node_count)
    throw PreconditionError("stream size range invalid for target network");
  if (min_recovery < 1 || min_recovery > max_recovery)
    throw PreconditionError("stream recovery range invalid");
  if (horizon < 2) throw PreconditionError("stream horizon must be at least 2");
}

std::vector<DisruptionEvent> poisson_stream(const DisruptionStreamConfig& config,
                                            const Topology& topology, std::uint64_t seed) {
  config.validate(topology);
  Engine engine(seed);
  std::vector<DisruptionEvent> events;
  const auto last_start = static_cast<double>(config.horizon - 1);
  double clock = 0.0;
  while (true) {
    clock += exponential(engine, config.rate);
    if (!(clock <= last_start)) break;
    DisruptionEvent ev;
    ev.target = topology.network;
    ev.apply_time = std::max<Timestep>(1, static_cast<Timestep>(std::ceil(clock)));
    const auto size = static_cast<std::size_t>(uniform_int(
        engine, static_cast<std::int64_t>(config.min_size), static_cast<std::int64_t>(config.max_size)));
    const Timestep rt = uniform_int(engine, config.min_recovery, config.max_recovery);
    ev.retract_time = std::min(ev.apply_time + rt, config.horizon);
    ev.nodes = fixed_pattern(size, topology, engine());
    events.push_back(std::move(ev));
  }
  return events;
}

nlohmann::json to_json(const DisruptionEvent& event) {
  return {
      {"apply_time", event.apply_time},
      {"retract_time", event.retract_time},
      {"target", to_string(event.target)},
      {"nodes", event.nodes},
  };
}

DisruptionEvent event_from_json(const nlohmann::json& doc) {
  DisruptionEvent ev;
  try {
    ev.apply_time = doc.at("apply_time").get<Timestep>();
    ev.retract_time = doc.at("retract_time").get<Timestep>();
    ev.target = parse_network(doc.at("target").get<std::string>());
    ev.nodes = doc.at("nodes").get<std::vector<NodeIndex>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed disruption event: ") + ex.what());
  }
  return ev;
}

}  // namespace granusim

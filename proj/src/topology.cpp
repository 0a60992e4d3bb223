#include "granusim/topology.hpp"

#include <algorithm>
#include <set>

#include "granusim/error.hpp"
#include "granusim/rng.hpp"

namespace granusim {

std::string_view to_string(NetworkId id) noexcept {
  switch (id) {
    case NetworkId::Water: return "water";
    case NetworkId::Power: return "power";
    case NetworkId::Business: return "business";
  }
  return "unknown";
}

NetworkId parse_network(std::string_view name) {
  for (NetworkId id : kAllNetworks) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown network '" + std::string(name) + "'");
}

void Topology::validate() const {
  if (node_count == 0) throw PreconditionError("topology must have at least one node");
  if (intrinsic_performance.size() != node_count)
    throw PreconditionError("intrinsic_performance must have one entry per node");
  for (double b : intrinsic_performance) {
    if (!(b >= 0.0 && b <= 1.0)) throw PreconditionError("intrinsic performance outside [0,1]");
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.source >= node_count || e.target >= node_count)
      throw PreconditionError("edge endpoint out of range");
    if (e.source == e.target) throw PreconditionError("self-loop edge");
    if (k > 0 && !(edges[k - 1] < e))
      throw PreconditionError("edges must be sorted and free of duplicates");
  }
}

std::uint64_t max_directed_edges(std::size_t node_count) noexcept {
  const auto n = static_cast<std::uint64_t>(node_count);
  return n == 0 ? 0 : n * (n - 1);
}

Topology generate_topology(NetworkId network, std::size_t node_count, std::size_t edge_count,
                           std::uint64_t seed) {
  if (node_count == 0) throw PreconditionError("node_count must be positive");
  const std::uint64_t slots = max_directed_edges(node_count);
  if (edge_count > slots) {
    throw EdgeCountOverflow("edge_count " + std::to_string(edge_count) + " exceeds " +
                            std::to_string(slots) + " distinct non-loop edges on " +
                            std::to_string(node_count) + " nodes");
  }

  // Floyd's sampling over the n(n-1) ordered non-loop slots.
  Engine engine(seed);
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = slots - edge_count; j < slots; ++j) {
    const std::uint64_t t = uniform_below(engine, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  Topology topo;
  topo.network = network;
  topo.node_count = node_count;
  topo.edges.reserve(edge_count);
  const std::uint64_t row = node_count - 1;
  for (std::uint64_t slot : chosen) {
    const auto source = static_cast<NodeIndex>(slot / row);
    auto target = static_cast<NodeIndex>(slot % row);
    if (target >= source) ++target;
    topo.edges.push_back({source, target});
  }
  // Slot order is already (source, target) order.
  topo.intrinsic_performance.assign(node_count, 1.0);
  return topo;
}

InterdependencyMap generate_interdependencies(std::span<const Topology> topologies,
                                              std::size_t couplings_per_node, std::uint64_t seed) {
  if (topologies.size() < 2)
    throw PreconditionError("interdependencies need at least two topologies");
  if (couplings_per_node == 0) throw PreconditionError("couplings_per_node must be positive");

  std::vector<const Topology*> ordered;
  for (const Topology& t : topologies) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const Topology* a, const Topology* b) { return a->network < b->network; });
  for (std::size_t k = 1; k < ordered.size(); ++k) {
    if (ordered[k - 1]->network == ordered[k]->network)
      throw PreconditionError("duplicate network in interdependency input");
  }

  Engine engine(seed);
  InterdependencyMap map;
  for (const Topology* consumer : ordered) {
    for (NodeIndex a = 0; a < consumer->node_count; ++a) {
      for (const Topology* provider : ordered) {
        if (provider == consumer) continue;
        const auto size = static_cast<std::uint64_t>(provider->node_count);
        for (std::size_t c = 0; c < couplings_per_node; ++c) {
          const auto b = c == 0 ? static_cast<NodeIndex>(a % size)
                                : static_cast<NodeIndex>(uniform_below(engine, size));
          map.couplings.push_back({{consumer->network, a}, {provider->network, b}});
        }
      }
    }
  }
  return map;
}

nlohmann::json to_json(const Topology& topology) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : topology.edges) edges.push_back({e.source, e.target});
  return {
      {"network", to_string(topology.network)},
      {"node_count", topology.node_count},
      {"edges", std::move(edges)},
      {"intrinsic_performance", topology.intrinsic_performance},
  };
}

nlohmann::json to_json(const InterdependencyMap& map) {
  nlohmann::json couplings = nlohmann::json::array();
  for (const Coupling& c : map.couplings) {
    couplings.push_back({
        {"consumer_network", to_string(c.consumer.network)},
        {"consumer_node", c.consumer.node},
        {"provider_network", to_string(c.provider.network)},
        {"provider_node", c.provider.node},
    });
  }
  return {{"couplings", std::move(couplings)}};
}

Topology topology_from_json(const nlohmann::json& doc) {
  Topology topo;
  try {
    topo.network = parse_network(doc.at("network").get<std::string>());
    topo.node_count = doc.at("node_count").get<std::size_t>();
    for (const auto& e : doc.at("edges")) {
      topo.edges.push_back({e.at(0).get<NodeIndex>(), e.at(1).get<NodeIndex>()});
    }
    topo.intrinsic_performance = doc.at("intrinsic_performance").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed topology document: ") + ex.what());
  }
  topo.validate();
  return topo;
}

InterdependencyMap interdependencies_from_json(const nlohmann::json& doc) {
  InterdependencyMap map;
  try {
    for (const auto& c : doc.at("couplings")) {
      map.couplings.push_back(
          {{parse_network(c.at("consumer_network").get<std::string>()),
            c.at("consumer_node").get<NodeIndex>()},
           {parse_network(c.at("provider_network").get<std::string>()),
            c.at("provider_node").get<NodeIndex>()}});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed interdependency document: ") + ex.what());
  }
  return map;
}

std::string serialize(const Topology& topology) { return to_json(topology).dump(2) + "\n"; }
std::string serialize(const InterdependencyMap& map) { return to_json(map).dump(2) + "\n"; }

}  // namespace granusim

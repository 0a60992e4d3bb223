#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace granusim {

enum class NetworkId : std::uint8_t { Water = 0, Power = 1, Business = 2 };

inline constexpr std::size_t kNetworkCount = 3;
inline constexpr std::array<NetworkId, kNetworkCount> kAllNetworks{
    NetworkId::Water, NetworkId::Power, NetworkId::Business};

constexpr std::size_t index_of(NetworkId id) noexcept { return static_cast<std::size_t>(id); }
std::string_view to_string(NetworkId id) noexcept;
NetworkId parse_network(std::string_view name);

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex source = 0;
  NodeIndex target = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed graph of one federate. Edges are sorted by (source, target).
struct Topology {
  NetworkId network = NetworkId::Water;
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  std::vector<double> intrinsic_performance;

  /// Throws PreconditionError when an invariant is broken.
  void validate() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

/// Largest number of distinct non-loop directed edges on `node_count` nodes.
std::uint64_t max_directed_edges(std::size_t node_count) noexcept;

/// G(n, m) directed random graph: exactly `edge_count` distinct non-loop
/// edges sampled uniformly without replacement. Throws EdgeCountOverflow.
Topology generate_topology(NetworkId network, std::size_t node_count, std::size_t edge_count,
                           std::uint64_t seed);

struct NodeRef {
  NetworkId network = NetworkId::Water;
  NodeIndex node = 0;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// One lifeline: `consumer` takes `provider`'s output as a cross-network input.
struct Coupling {
  NodeRef consumer;
  NodeRef provider;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct InterdependencyMap {
  std::vector<Coupling> couplings;

  friend bool operator==(const InterdependencyMap&, const InterdependencyMap&) = default;
};

/// For every node a of every network A and every other network B, emits
/// `couplings_per_node` couplings from a to B. The first uses b = a mod |B|;
/// the rest draw b uniformly from the seeded stream.
InterdependencyMap generate_interdependencies(std::span<const Topology> topologies,
                                              std::size_t couplings_per_node, std::uint64_t seed);

// Serialization uses sorted keys, so equal values produce identical bytes.
nlohmann::json to_json(const Topology& topology);
nlohmann::json to_json(const InterdependencyMap& map);
Topology topology_from_json(const nlohmann::json& doc);
InterdependencyMap interdependencies_from_json(const nlohmann::json& doc);
std::string serialize(const Topology& topology);
std::string serialize(const InterdependencyMap& map);

}  // namespace granusim

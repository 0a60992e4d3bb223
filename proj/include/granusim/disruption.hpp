#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "granusim/topology.hpp"

namespace granusim {

using Timestep = std::int64_t;

/// Nodes of `target` are removed at apply_time and reinstated at retract_time.
struct DisruptionEvent {
  Timestep apply_time = 0;
  Timestep retract_time = 0;
  NetworkId target = NetworkId::Water;
  std::vector<NodeIndex> nodes;  ///< sorted, distinct

  Timestep recovery_time() const noexcept { return retract_time - apply_time; }
  /// Throws PreconditionError on a malformed event.
  void validate(const Topology& topology, Timestep horizon) const;

  friend bool operator==(const DisruptionEvent&, const DisruptionEvent&) = default;
};

/// `ds` distinct nodes drawn without replacement from `seed`. The draw is a
/// prefix of one seeded permutation, so patterns for growing ds are nested.
/// Returned sorted. Throws SizeOverflow if ds > node_count.
std::vector<NodeIndex> fixed_pattern(std::size_t ds, const Topology& topology, std::uint64_t seed);

/// 64-bit content hash of a node set, written to the results file.
std::uint64_t pattern_hash(const std::vector<NodeIndex>& nodes);

struct DisruptionStreamConfig {
  double rate = 0.01;  ///< expected events per timestep
  std::size_t min_size = 1;
  std::size_t max_size = 1;
  Timestep min_recovery = 1;
  Timestep max_recovery = 1;
  Timestep horizon = 1000;

  void validate(const Topology& topology) const;
};

/// Poisson arrivals with exponential inter-arrival times accumulated from 0.
/// Arrival at continuous time T lands on timestep ceil(T); arrivals past
/// horizon - 1 are dropped and retractions are truncated at the horizon.
/// Sizes and recovery times are uniform over their configured ranges.
std::vector<DisruptionEvent> poisson_stream(const DisruptionStreamConfig& config,
                                            const Topology& topology, std::uint64_t seed);

nlohmann::json to_json(const DisruptionEvent& event);
DisruptionEvent event_from_json(const nlohmann::json& doc);

}  // namespace granusim

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "granusim/disruption.hpp"
#include "granusim/federate.hpp"
#include "granusim/metrics.hpp"
#include "granusim/topology.hpp"

namespace granusim {

struct NetworkSpec {
  NetworkId network = NetworkId::Water;
  std::size_t nodes = 1;
  std::size_t edges = 0;
  FederateParams params;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Water 22/77, Power 21/77, Business 20/75 with default dynamics.
std::array<NetworkSpec, kNetworkCount> default_networks();

/// Ascending level sets of the factorial design.
struct FactorLevels {
  std::vector<Timestep> tg{2, 12, 14, 21, 27};
  std::vector<Timestep> rt{2, 9, 13, 17, 22};
  std::vector<std::int64_t> ds{8, 12, 14, 18, 21};

  void validate(std::size_t origin_nodes) const;
  friend bool operator==(const FactorLevels&, const FactorLevels&) = default;
};

enum class DisruptionMode : std::uint8_t {
  Fixed,     ///< one event of the fixed pattern at the warm-up offset
  Poisson,   ///< Poisson stream on the origin network
  Explicit,  ///< events listed in the scenario
};

/// Full parameterization of one run (and the base of an experiment).
struct ScenarioConfig {
  std::uint64_t master_seed = 42;
  Timestep horizon = 400;
  Timestep warmup = 50;
  Timestep recovery_headroom = 200;
  std::array<NetworkSpec, kNetworkCount> networks = default_networks();
  std::size_t couplings_per_node = 1;
  Factors factors{12, 9, 8};
  bool align_sync = false;
  NetworkId origin = NetworkId::Water;
  NetworkId target = NetworkId::Business;
  FactorLevels levels;

  DisruptionMode mode = DisruptionMode::Fixed;
  DisruptionStreamConfig poisson;
  std::vector<DisruptionEvent> events;

  const NetworkSpec& spec(NetworkId network) const;
  /// Disruption onset: the warm-up, or the next sync instant when aligned.
  Timestep disruption_start() const noexcept;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ScenarioConfig& config);
/// Fields missing from `doc` keep their defaults; unknown fields are errors.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
/// Parses scenario text; diagnostics carry the line and column or the field path.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace granusim

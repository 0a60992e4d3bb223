#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "granusim/topology.hpp"

namespace granusim {

/// Convex weights of the three input channels of a node.
struct DynamicsWeights {
  double internal = 0.3;
  double in_network = 0.4;
  double external = 0.3;

  void validate() const;
  friend bool operator==(const DynamicsWeights&, const DynamicsWeights&) = default;
};

struct FederateParams {
  DynamicsWeights weights;
  std::size_t lag = 1;  ///< timesteps before a predecessor's output reaches a node

  void validate() const;
  friend bool operator==(const FederateParams&, const FederateParams&) = default;
};

/// Shipped defaults: Water and Power react within one step, Business within two.
FederateParams default_params(NetworkId network);

struct BoundaryValue {
  std::size_t coupling = 0;
  double value = 0.0;

  friend bool operator==(const BoundaryValue&, const BoundaryValue&) = default;
};

/// One network's node dynamics. A node i that is not disrupted updates to
///
///   p_i = clamp(w_int*b_i + w_in*m_i + w_ext*e_i, 0, 1)
///
/// where b_i is its intrinsic performance, m_i the mean over in-edges j->i of
/// p_j(t - lag) (a currently disrupted j contributes 0, a node without
/// in-edges uses b_i), and e_i the mean of its last-synchronized foreign
/// inputs. A node with no foreign inputs drops the external channel and
/// renormalizes the other two weights. Disrupted nodes stay at exactly 0.
///
/// Cross-network values only change through set_input(), which the
/// coordinator calls at synchronization instants.
class Federate {
public:
  Federate(Topology topology, FederateParams params);

  /// Adds a foreign-input slot consumed by `node`; returns the slot index.
  std::size_t add_input(NodeIndex node, double initial = 1.0);
  /// Registers `node` as the provider of coupling `coupling`.
  void add_export(std::size_t coupling, NodeIndex node);

  void step();
  void apply_disruption(std::span<const NodeIndex> nodes);
  void retract_disruption(std::span<const NodeIndex> nodes);

  /// Current performance of every exported node, in registration order.
  std::vector<BoundaryValue> read_boundary() const;
  void set_input(std::size_t slot, double value);

  NetworkId network() const noexcept { return topology_.network; }
  const Topology& topology() const noexcept { return topology_; }
  const FederateParams& params() const noexcept { return params_; }
  std::size_t node_count() const noexcept { return topology_.node_count; }
  std::span<const double> performance() const noexcept { return performance_; }
  std::span<const double> foreign_inputs() const noexcept { return inputs_; }
  std::span<const std::size_t> input_slots(NodeIndex node) const;
  bool disrupted(NodeIndex node) const { return disruption_depth_.at(node) > 0; }
  std::size_t disrupted_count() const noexcept;
  double performance_sum() const noexcept;

  nlohmann::json snapshot() const;

  friend bool operator==(const Federate&, const Federate&) = default;

private:
  void check_nodes(std::span<const NodeIndex> nodes) const;
  std::span<const double> lagged() const noexcept;

  Topology topology_;
  FederateParams params_;

  // Predecessors in CSR form: pred_[pred_offset_[i] .. pred_offset_[i+1]).
  std::vector<std::size_t> pred_offset_;
  std::vector<NodeIndex> pred_;

  std::vector<double> performance_;
  // Overlapping disruptions nest; a node is disrupted while its depth > 0.
  std::vector<std::uint16_t> disruption_depth_;

  std::vector<double> inputs_;
  std::vector<std::vector<std::size_t>> slots_of_node_;
  std::vector<BoundaryValue> exports_template_;
  std::vector<NodeIndex> export_nodes_;

  // Post-step performance of the last `lag` steps, row-major, one row per step.
  std::vector<double> history_;
  std::size_t oldest_row_ = 0;
};

}  // namespace granusim

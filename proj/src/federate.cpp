#include "granusim/federate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "granusim/error.hpp"

namespace granusim {

void DynamicsWeights::validate() const {
  if (internal < 0.0 || in_network < 0.0 || external < 0.0)
    throw ConfigError("dynamics weights must be nonnegative");
  if (std::abs(internal + in_network + external - 1.0) > 1e-9)
    throw ConfigError("dynamics weights must sum to 1");
}

void FederateParams::validate() const {
  weights.validate();
  if (lag == 0) throw ConfigError("lag must be a positive number of timesteps");
}

FederateParams default_params(NetworkId network) {
  FederateParams params;
  params.lag = network == NetworkId::Business ? 2 : 1;
  return params;
}

Federate::Federate(Topology topology, FederateParams params)
    : topology_(std::move(topology)), params_(params) {
  topology_.validate();
  params_.validate();
  const std::size_t n = topology_.node_count;

  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : topology_.edges) ++indegree[e.target];
  pred_offset_.assign(n + 1, 0);
  std::partial_sum(indegree.begin(), indegree.end(), pred_offset_.begin() + 1);
  pred_.resize(topology_.edges.size());
  std::vector<std::size_t> fill(pred_offset_.begin(), pred_offset_.end() - 1);
  for (const Edge& e : topology_.edges) pred_[fill[e.target]++] = e.source;

  performance_ = topology_.intrinsic_performance;
  disruption_depth_.assign(n, 0);
  slots_of_node_.resize(n);
  history_.resize(params_.lag * n);
  for (std::size_t r = 0; r < params_.lag; ++r)
    std::copy(performance_.begin(), performance_.end(), history_.begin() + r * n);
}

std::size_t Federate::add_input(NodeIndex node, double initial) {
  if (node >= node_count()) throw UnknownNode("input slot for unknown node " + std::to_string(node));
  inputs_.push_back(std::clamp(initial, 0.0, 1.0));
  slots_of_node_[node].push_back(inputs_.size() - 1);
  return inputs_.size() - 1;
}

void Federate::add_export(std::size_t coupling, NodeIndex node) {
  if (node >= node_count()) throw UnknownNode("export of unknown node " + std::to_string(node));
  exports_template_.push_back({coupling, 0.0});
  export_nodes_.push_back(node);
}

std::span<const std::size_t> Federate::input_slots(NodeIndex node) const {
  return slots_of_node_.at(node);
}

std::span<const double> Federate::lagged() const noexcept {
  const std::size_t n = node_count();
  return std::span<const double>(history_).subspan(oldest_row_ * n, n);
}

void Federate::step() {
  const std::size_t n = node_count();
  const std::span<const double> lagged_perf = lagged();
  const DynamicsWeights& w = params_.weights;
  const double internal_only = w.internal + w.in_network;

  // Written as a deficit from full service, which makes the all-ones state an
  // exact fixed point in floating point.
  for (std::size_t i = 0; i < n; ++i) {
    if (disruption_depth_[i] > 0) {
      performance_[i] = 0.0;
      continue;
    }
    const double intrinsic = topology_.intrinsic_performance[i];

    double in_mean = intrinsic;
    const std::size_t begin = pred_offset_[i];
    const std::size_t end = pred_offset_[i + 1];
    if (end > begin) {
      double sum = 0.0;
      for (std::size_t k = begin; k < end; ++k) {
        const NodeIndex j = pred_[k];
        if (disruption_depth_[j] == 0) sum += lagged_perf[j];
      }
      in_mean = sum / static_cast<double>(end - begin);
    }

    const auto& slots = slots_of_node_[i];
    double deficit;
    if (slots.empty()) {
      if (internal_only > 0.0) {
        deficit = (w.internal * (1.0 - intrinsic) + w.in_network * (1.0 - in_mean)) / internal_only;
      } else {
        deficit = 1.0 - intrinsic;
      }
    } else {
      double ext = 0.0;
      for (std::size_t s : slots) ext += inputs_[s];
      const double ext_mean = ext / static_cast<double>(slots.size());
      deficit = w.internal * (1.0 - intrinsic) + w.in_network * (1.0 - in_mean) +
                w.external * (1.0 - ext_mean);
    }
    performance_[i] = std::clamp(1.0 - deficit, 0.0, 1.0);
  }

  std::copy(performance_.begin(), performance_.end(), history_.begin() + oldest_row_ * n);
  oldest_row_ = (oldest_row_ + 1) % params_.lag;
}

void Federate::check_nodes(std::span<const NodeIndex> nodes) const {
  for (NodeIndex v : nodes) {
    if (v >= node_count()) {
      throw UnknownNode("node " + std::to_string(v) + " is not in the " +
                        std::string(to_string(network())) + " network (" +
                        std::to_string(node_count()) + " nodes)");
    }
  }
}

void Federate::apply_disruption(std::span<const NodeIndex> nodes) {
  check_nodes(nodes);
  for (NodeIndex v : nodes) {
    ++disruption_depth_[v];
    performance_[v] = 0.0;
  }
}

void Federate::retract_disruption(std::span<const NodeIndex> nodes) {
  check_nodes(nodes);
  for (NodeIndex v : nodes) {
    if (disruption_depth_[v] == 0) continue;
    if (--disruption_depth_[v] == 0) performance_[v] = topology_.intrinsic_performance[v];
  }
}

std::vector<BoundaryValue> Federate::read_boundary() const {
  std::vector<BoundaryValue> out = exports_template_;
  for (std::size_t k = 0; k < out.size(); ++k) out[k].value = performance_[export_nodes_[k]];
  return out;
}

void Federate::set_input(std::size_t slot, double value) {
  inputs_.at(slot) = std::clamp(value, 0.0, 1.0);
}

std::size_t Federate::disrupted_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(disruption_depth_.begin(), disruption_depth_.end(),
                    [](std::uint16_t d) { return d > 0; }));
}

double Federate::performance_sum() const noexcept {
  return std::accumulate(performance_.begin(), performance_.end(), 0.0);
}

nlohmann::json Federate::snapshot() const {
  std::vector<NodeIndex> disrupted_nodes;
  for (NodeIndex i = 0; i < node_count(); ++i) {
    if (disruption_depth_[i] > 0) disrupted_nodes.push_back(i);
  }
  return {
      {"topology", to_json(topology_)},
      {"lag", params_.lag},
      {"weights",
       {{"internal", params_.weights.internal},
        {"in_network", params_.weights.in_network},
        {"external", params_.weights.external}}},
      {"performance", performance_},
      {"disrupted", disrupted_nodes},
      {"foreign_inputs", inputs_},
  };
}

}  // namespace granusim

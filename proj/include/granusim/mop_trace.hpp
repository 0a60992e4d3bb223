#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "granusim/topology.hpp"

namespace granusim {

/// Per-timestep, per-network sum of node performances for t in [0, horizon],
/// with the baseline sum each series is normalized against.
class MoPTrace {
public:
  MoPTrace() = default;
  explicit MoPTrace(std::int64_t horizon);

  std::int64_t horizon() const noexcept { return horizon_; }
  bool has(NetworkId network) const noexcept { return present_[index_of(network)]; }

  void add_network(NetworkId network);
  void record(NetworkId network, std::int64_t t, double performance_sum);
  void set_baseline(NetworkId network, double baseline_sum);

  double raw(NetworkId network, std::int64_t t) const;
  double baseline(NetworkId network) const;
  /// MoP in percent of baseline. Throws ZeroBaseline.
  double percent(NetworkId network, std::int64_t t) const;
  std::vector<double> percent_series(NetworkId network) const;

  /// `t,mop_water,mop_power,mop_business`, six decimals; absent networks are blank.
  std::string to_csv() const;

  friend bool operator==(const MoPTrace&, const MoPTrace&) = default;

private:
  std::int64_t horizon_ = 0;
  std::array<bool, kNetworkCount> present_{};
  std::array<double, kNetworkCount> baseline_{};
  std::array<std::vector<double>, kNetworkCount> sums_;
};

}  // namespace granusim

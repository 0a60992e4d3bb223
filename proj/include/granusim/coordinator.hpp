#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "granusim/disruption.hpp"
#include "granusim/federate.hpp"
#include "granusim/mop_trace.hpp"
#include "granusim/topology.hpp"

namespace granusim {

/// Federates synchronize at every multiple of tg in (0, horizon].
struct SyncSchedule {
  Timestep tg = 1;
  Timestep horizon = 1;

  void validate() const;
  bool is_sync(Timestep t) const noexcept { return t > 0 && t % tg == 0; }
  std::vector<Timestep> sync_instants() const;
};

/// The federates of one run plus the lifelines between them. Federates are
/// indexed by network id, so registration order never affects results.
class Federation {
public:
  Federation(std::vector<Federate> federates, const InterdependencyMap& map);

  bool has(NetworkId network) const noexcept { return slots_[index_of(network)].has_value(); }
  Federate& federate(NetworkId network);
  const Federate& federate(NetworkId network) const;
  std::vector<NetworkId> networks() const;
  std::size_t coupling_count() const noexcept { return routes_.size(); }

  /// Two-phase exchange: every boundary value is read before any is written.
  void exchange();

  friend bool operator==(const Federation&, const Federation&) = default;

private:
  struct Route {
    NetworkId consumer;
    std::size_t slot;
    friend bool operator==(const Route&, const Route&) = default;
  };

  std::array<std::optional<Federate>, kNetworkCount> slots_;
  std::vector<Route> routes_;
  std::vector<double> staged_;
};

/// Called after every timestep (and after its exchange, if any) by the
/// sequential path. Used for instrumentation.
using StepObserver = std::function<void(Timestep t, const Federation&)>;

struct RunOptions {
  int threads = 1;  ///< upper bound on concurrently stepped federates
};

/// Lockstep run. Between synchronization instants the federates advance
/// independently and may be stepped concurrently; each exchange is a barrier.
/// The trace is bit-identical to run_sequential_reference.
MoPTrace run(Federation& federation, const SyncSchedule& schedule,
             std::span<const DisruptionEvent> events, RunOptions options = {});

/// Single-threaded round robin (Water, Power, Business) over the same contract.
MoPTrace run_sequential_reference(Federation& federation, const SyncSchedule& schedule,
                                  std::span<const DisruptionEvent> events,
                                  const StepObserver& observer = {});

}  // namespace granusim

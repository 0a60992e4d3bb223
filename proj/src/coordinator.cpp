#include "granusim/coordinator.hpp"

#include <algorithm>
#include <string>

#include <omp.h>

#include "granusim/error.hpp"

namespace granusim {

void SyncSchedule::validate() const {
  if (tg < 1) throw ScheduleError("time granularity must be >= 1");
  if (horizon < 1) throw ScheduleError("horizon must be >= 1");
}

std::vector<Timestep> SyncSchedule::sync_instants() const {
  std::vector<Timestep> out;
  for (Timestep t = tg; t <= horizon; t += tg) out.push_back(t);
  return out;
}

Federation::Federation(std::vector<Federate> federates, const InterdependencyMap& map) {
  for (Federate& f : federates) {
    auto& slot = slots_[index_of(f.network())];
    if (slot) throw PreconditionError("network registered twice in federation");
    slot.emplace(std::move(f));
  }
  routes_.reserve(map.couplings.size());
  for (std::size_t k = 0; k < map.couplings.size(); ++k) {
    const Coupling& c = map.couplings[k];
    if (c.consumer.network == c.provider.network)
      throw PreconditionError("coupling joins a network to itself");
    if (!has(c.consumer.network) || !has(c.provider.network))
      throw PreconditionError("coupling references a network outside the federation");
    const std::size_t slot = federate(c.consumer.network).add_input(c.consumer.node);
    federate(c.provider.network).add_export(k, c.provider.node);
    routes_.push_back({c.consumer.network, slot});
  }
  staged_.assign(routes_.size(), 1.0);
}

Federate& Federation::federate(NetworkId network) {
  auto& slot = slots_[index_of(network)];
  if (!slot) throw PreconditionError("network not in federation");
  return *slot;
}

const Federate& Federation::federate(NetworkId network) const {
  const auto& slot = slots_[index_of(network)];
  if (!slot) throw PreconditionError("network not in federation");
  return *slot;
}

std::vector<NetworkId> Federation::networks() const {
  std::vector<NetworkId> out;
  for (NetworkId id : kAllNetworks) {
    if (has(id)) out.push_back(id);
  }
  return out;
}

void Federation::exchange() {
  for (const auto& slot : slots_) {
    if (!slot) continue;
    for (const BoundaryValue& v : slot->read_boundary()) staged_[v.coupling] = v.value;
  }
  for (std::size_t k = 0; k < routes_.size(); ++k) {
    federate(routes_[k].consumer).set_input(routes_[k].slot, staged_[k]);
  }
}

namespace {

struct Action {
  Timestep t;
  int kind;  // 0 = retract, 1 = apply; retractions go first within a timestep
  const std::vector<NodeIndex>* nodes;
};

// Per-network, time-ordered disruption actions with a delivery cursor.
struct Timeline {
  std::vector<Action> actions;
  std::size_t next = 0;

  void deliver(Timestep t, Federate& fed) {
    while (next < actions.size() && actions[next].t == t) {
      const Action& a = actions[next++];
      if (a.kind == 0) {
        fed.retract_disruption(*a.nodes);
      } else {
        fed.apply_disruption(*a.nodes);
      }
    }
  }
};

struct Plan {
  std::array<Timeline, kNetworkCount> timelines;
  Timestep baseline_t = 0;
};

Plan compile(const Federation& federation, const SyncSchedule& schedule,
             std::span<const DisruptionEvent> events) {
  schedule.validate();
  Plan plan;
  Timestep first_apply = schedule.horizon + 1;
  for (const DisruptionEvent& ev : events) {
    if (!federation.has(ev.target))
      throw ScheduleError("event targets network outside the federation");
    if (ev.apply_time < 1 || ev.apply_time > schedule.horizon)
      throw ScheduleError("event apply_time " + std::to_string(ev.apply_time) +
                          " outside [1, " + std::to_string(schedule.horizon) + "]");
    if (ev.retract_time <= ev.apply_time || ev.retract_time > schedule.horizon)
      throw ScheduleError("event retract_time " + std::to_string(ev.retract_time) +
                          " outside (apply_time, horizon]");
    if (ev.nodes.empty()) throw ScheduleError("event with empty node set");
    const std::size_t n = federation.federate(ev.target).node_count();
    for (NodeIndex v : ev.nodes) {
      if (v >= n) throw UnknownNode("event node " + std::to_string(v) + " out of range");
    }
    auto& actions = plan.timelines[index_of(ev.target)].actions;
    actions.push_back({ev.apply_time, 1, &ev.nodes});
    actions.push_back({ev.retract_time, 0, &ev.nodes});
    first_apply = std::min(first_apply, ev.apply_time);
  }
  for (Timeline& line : plan.timelines) {
    std::stable_sort(line.actions.begin(), line.actions.end(), [](const Action& a, const Action& b) {
      if (a.t != b.t) return a.t < b.t;
      if (a.kind != b.kind) return a.kind < b.kind;
      return *a.nodes < *b.nodes;
    });
  }
  plan.baseline_t = events.empty() ? 0 : first_apply - 1;
  return plan;
}

MoPTrace start_trace(Federation& federation, Timestep horizon) {
  MoPTrace trace(horizon);
  for (NetworkId id : federation.networks()) {
    trace.add_network(id);
    trace.record(id, 0, federation.federate(id).performance_sum());
  }
  return trace;
}

void finish_trace(MoPTrace& trace, const Federation& federation, Timestep baseline_t) {
  for (NetworkId id : federation.networks()) trace.set_baseline(id, trace.raw(id, baseline_t));
}

}  // namespace

MoPTrace run_sequential_reference(Federation& federation, const SyncSchedule& schedule,
                                  std::span<const DisruptionEvent> events,
                                  const StepObserver& observer) {
  Plan plan = compile(federation, schedule, events);
  const std::vector<NetworkId> order = federation.networks();
  MoPTrace trace = start_trace(federation, schedule.horizon);
  federation.exchange();
  if (observer) observer(0, federation);

  for (Timestep t = 1; t <= schedule.horizon; ++t) {
    for (NetworkId id : order) {
      Federate& fed = federation.federate(id);
      plan.timelines[index_of(id)].deliver(t, fed);
      fed.step();
      trace.record(id, t, fed.performance_sum());
    }
    if (schedule.is_sync(t)) federation.exchange();
    if (observer) observer(t, federation);
  }
  finish_trace(trace, federation, plan.baseline_t);
  return trace;
}

MoPTrace run(Federation& federation, const SyncSchedule& schedule,
             std::span<const DisruptionEvent> events, RunOptions options) {
  Plan plan = compile(federation, schedule, events);
  const std::vector<NetworkId> order = federation.networks();
  std::vector<Federate*> feds;
  for (NetworkId id : order) feds.push_back(&federation.federate(id));
  const int count = static_cast<int>(feds.size());
  const int threads = std::clamp(options.threads, 1, std::max(count, 1));

  MoPTrace trace = start_trace(federation, schedule.horizon);
  federation.exchange();

  const Timestep horizon = schedule.horizon;
  const Timestep tg = schedule.tg;

  // One parallel region for the whole run: each window is a worksharing loop
  // over federates, closed by the barrier of the exchanging `single`.
#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    for (Timestep start = 0; start < horizon; start += tg) {
      const Timestep stop = std::min(start + tg, horizon);
#pragma omp for schedule(static)
      for (int f = 0; f < count; ++f) {
        Federate& fed = *feds[f];
        Timeline& line = plan.timelines[index_of(fed.network())];
        for (Timestep t = start + 1; t <= stop; ++t) {
          line.deliver(t, fed);
          fed.step();
          trace.record(fed.network(), t, fed.performance_sum());
        }
      }
      if (schedule.is_sync(stop)) {
#pragma omp single
        federation.exchange();
      }
    }
  }

  finish_trace(trace, federation, plan.baseline_t);
  return trace;
}

}  // namespace granusim

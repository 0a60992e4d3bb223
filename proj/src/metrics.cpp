#include "granusim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "granusim/error.hpp"

namespace granusim {

MoPTrace::MoPTrace(std::int64_t horizon) : horizon_(horizon) {
  if (horizon < 0) throw PreconditionError("trace horizon must be nonnegative");
}

void MoPTrace::add_network(NetworkId network) {
  const std::size_t k = index_of(network);
  present_[k] = true;
  sums_[k].assign(static_cast<std::size_t>(horizon_) + 1, 0.0);
}

void MoPTrace::record(NetworkId network, std::int64_t t, double performance_sum) {
  sums_[index_of(network)][static_cast<std::size_t>(t)] = performance_sum;
}

void MoPTrace::set_baseline(NetworkId network, double baseline_sum) {
  baseline_[index_of(network)] = baseline_sum;
}

double MoPTrace::raw(NetworkId network, std::int64_t t) const {
  if (!has(network)) throw PreconditionError("trace has no series for this network");
  if (t < 0 || t > horizon_) throw PreconditionError("timestep outside trace");
  return sums_[index_of(network)][static_cast<std::size_t>(t)];
}

double MoPTrace::baseline(NetworkId network) const {
  if (!has(network)) throw PreconditionError("trace has no series for this network");
  return baseline_[index_of(network)];
}

double MoPTrace::percent(NetworkId network, std::int64_t t) const {
  return mop_percent(raw(network, t), baseline(network));
}

std::vector<double> MoPTrace::percent_series(NetworkId network) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon_) + 1);
  for (std::int64_t t = 0; t <= horizon_; ++t) out.push_back(percent(network, t));
  return out;
}

std::string MoPTrace::to_csv() const {
  std::string out = "t,mop_water,mop_power,mop_business\n";
  char buf[64];
  for (std::int64_t t = 0; t <= horizon_; ++t) {
    out += std::to_string(t);
    for (NetworkId id : kAllNetworks) {
      out += ',';
      if (!has(id)) continue;
      std::snprintf(buf, sizeof buf, "%.6f", percent(id, t));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

double mop_percent(double performance_sum, double baseline_sum) {
  if (baseline_sum == 0.0) throw ZeroBaseline("MoP baseline sum is zero");
  return 100.0 * performance_sum / baseline_sum;
}

double mop(const Federate& federate, double baseline_sum) {
  return mop_percent(federate.performance_sum(), baseline_sum);
}

double compute_spds(const MoPTrace& trace, NetworkId target, Timestep apply_time) {
  if (apply_time < 0 || apply_time > trace.horizon())
    throw PreconditionError("apply_time outside trace");
  double lowest = std::numeric_limits<double>::infinity();
  for (Timestep t = apply_time; t <= trace.horizon(); ++t)
    lowest = std::min(lowest, trace.percent(target, t));
  return std::clamp(100.0 - lowest, 0.0, 100.0);
}

std::optional<Timestep> compute_sprt(const MoPTrace& trace, NetworkId target, Timestep retract_time) {
  if (retract_time < 0 || retract_time > trace.horizon())
    throw PreconditionError("retract_time outside trace");
  for (Timestep t = retract_time; t <= trace.horizon(); ++t) {
    if (trace.percent(target, t) >= kRecoveryLevelPct) return t - retract_time;
  }
  return std::nullopt;
}

RunOutcome evaluate_outcome(const MoPTrace& trace, NetworkId target, Timestep apply_time,
                            Timestep retract_time, Factors factors, double sec_per_timestep) {
  RunOutcome out;
  out.spds = compute_spds(trace, target, apply_time);
  out.sprt = compute_sprt(trace, target, retract_time);
  out.visible = classify_visibility(out.spds);
  out.sec_per_timestep = sec_per_timestep;
  out.factors = factors;
  return out;
}

}  // namespace granusim

#pragma once

#include <cstdint>
#include <optional>

#include "granusim/disruption.hpp"
#include "granusim/federate.hpp"
#include "granusim/mop_trace.hpp"

namespace granusim {

/// A propagated disruption is visible once target MoP drops below 95%.
inline constexpr double kVisibilityThresholdPct = 5.0;
/// Recovery means reaching 99% of baseline MoP.
inline constexpr double kRecoveryLevelPct = 99.0;

/// 100 * performance_sum / baseline_sum. Throws ZeroBaseline.
double mop_percent(double performance_sum, double baseline_sum);
double mop(const Federate& federate, double baseline_sum);

/// 100 minus the lowest target MoP at or after apply_time, floored at 0.
double compute_spds(const MoPTrace& trace, NetworkId target, Timestep apply_time);

/// Steps from retract_time until target MoP first reaches 99%;
/// nullopt (censored) when that never happens within the horizon.
std::optional<Timestep> compute_sprt(const MoPTrace& trace, NetworkId target, Timestep retract_time);

/// Strictly greater than 5%: an SPDS of exactly 5.0 is not visible.
constexpr bool classify_visibility(double spds) noexcept { return spds > kVisibilityThresholdPct; }

struct Factors {
  Timestep tg = 1;
  Timestep rt = 1;
  std::int64_t ds = 1;

  friend bool operator==(const Factors&, const Factors&) = default;
};

struct RunOutcome {
  double spds = 0.0;
  std::optional<Timestep> sprt;  ///< nullopt when censored
  bool visible = false;
  double sec_per_timestep = 0.0;
  Factors factors;

  bool censored() const noexcept { return !sprt.has_value(); }
};

RunOutcome evaluate_outcome(const MoPTrace& trace, NetworkId target, Timestep apply_time,
                            Timestep retract_time, Factors factors, double sec_per_timestep);

}  // namespace granusim

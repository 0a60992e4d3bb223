#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "granusim/coordinator.hpp"
#include "granusim/metrics.hpp"
#include "granusim/scenario.hpp"

namespace granusim {

/// Topologies (indexed by network) and lifelines regenerated from the master seed.
struct World {
  std::vector<Topology> topologies;
  InterdependencyMap map;

  const Topology& topology(NetworkId network) const { return topologies.at(index_of(network)); }
};

World build_world(const ScenarioConfig& config);
Federation build_federation(const ScenarioConfig& config, const World& world);
/// The disruption schedule of one run, resolved from the scenario's mode.
std::vector<DisruptionEvent> build_events(const ScenarioConfig& config, const World& world);

struct ExecutionOptions {
  int threads = 1;
  bool sequential_reference = false;
};

struct RunResult {
  RunOutcome outcome;
  MoPTrace trace;
  std::vector<DisruptionEvent> events;
  std::uint64_t pattern_hash = 0;
  Timestep apply_time = 0;
  Timestep retract_time = 0;
};

/// Builds the world, runs the coordinator and evaluates the outcome on the
/// target network. Only the coordinator loop is timed.
RunResult run_scenario(const ScenarioConfig& config, ExecutionOptions options = {});

/// k levels in [lo, hi]: one uniform integer from each of k equal strata.
/// Throws RangeTooSmall when the range has fewer than k integers.
std::vector<Timestep> lhs_levels(std::size_t k, Timestep lo, Timestep hi, std::uint64_t seed);

/// Cartesian product in lexicographic (ds, rt, tg) order.
std::vector<Factors> build_layout(const FactorLevels& levels);

struct ResultRow {
  std::size_t run_id = 0;
  Factors factors;
  double spds = 0.0;
  std::optional<Timestep> sprt;
  bool visible = false;
  double sec_per_step = 0.0;
  std::uint64_t pattern_hash = 0;
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
  bool censored() const noexcept { return ok() && !sprt.has_value(); }
};

struct ExperimentOptions {
  int jobs = 0;             ///< 0 = available cores; 1 = sequential reference path
  std::string traces_dir;   ///< when non-empty, one MoP trace CSV per run
};

/// Runs every layout entry on a copy of `base`. A failing run is reported in
/// its row's status and the batch continues. Rows come back in layout order.
std::vector<ResultRow> run_experiment(const ScenarioConfig& base, std::span<const Factors> layout,
                                      const ExperimentOptions& options = {});

inline constexpr const char* kResultsHeader =
    "run_id,tg,rt,ds,spds_pct,sprt_steps,visible,censored,sec_per_step,pattern_hash,status";

/// One CSV line without the newline. With include_timing=false the timing
/// column is left blank, which is the deterministic projection of a row.
std::string format_row(const ResultRow& row, bool include_timing = true);
std::string results_csv(std::span<const ResultRow> rows, bool include_timing = true);
std::vector<ResultRow> parse_results_csv(const std::string& text);
std::vector<ResultRow> read_results_csv(const std::string& path);

struct TimingSample {
  Timestep tg = 1;
  double sec_per_timestep = 0.0;
};

/// One timed run per tg at the config's fixed (rt, ds); best of `repeats`.
std::vector<TimingSample> timing_profile(const ScenarioConfig& config, std::span<const Timestep> tgs,
                                         int repeats = 3, int threads = 1);

/// Writes via a temporary sibling and renames, so no partial file remains.
void write_file_atomic(const std::string& path, const std::string& content);
int available_cores() noexcept;

}  // namespace granusim

#include "granusim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <omp.h>

#include "granusim/error.hpp"
#include "granusim/rng.hpp"

namespace granusim {

namespace {

Stream topology_stream(NetworkId network) {
  switch (network) {
    case NetworkId::Water: return Stream::TopologyWater;
    case NetworkId::Power: return Stream::TopologyPower;
    case NetworkId::Business: return Stream::TopologyBusiness;
  }
  return Stream::TopologyWater;
}

}  // namespace

World build_world(const ScenarioConfig& config) {
  World world;
  for (const NetworkSpec& spec : config.networks) {
    world.topologies.push_back(generate_topology(spec.network, spec.nodes, spec.edges,
                                                 stream_seed(config.master_seed, topology_stream(spec.network))));
  }
  world.map = generate_interdependencies(world.topologies, config.couplings_per_node,
                                         stream_seed(config.master_seed, Stream::Interdependency));
  return world;
}

Federation build_federation(const ScenarioConfig& config, const World& world) {
  std::vector<Federate> federates;
  for (const Topology& topo : world.topologies)
    federates.emplace_back(topo, config.spec(topo.network).params);
  return Federation(std::move(federates), world.map);
}

std::vector<DisruptionEvent> build_events(const ScenarioConfig& config, const World& world) {
  const Topology& origin = world.topology(config.origin);
  switch (config.mode) {
    case DisruptionMode::Fixed: {
      DisruptionEvent ev;
      ev.target = config.origin;
      ev.apply_time = config.disruption_start();
      ev.retract_time = ev.apply_time + config.factors.rt;
      ev.nodes = fixed_pattern(static_cast<std::size_t>(config.factors.ds), origin,
                               stream_seed(config.master_seed, Stream::Pattern));
      return {std::move(ev)};
    }
    case DisruptionMode::Poisson: {
      DisruptionStreamConfig stream = config.poisson;
      stream.horizon = config.horizon;
      return poisson_stream(stream, origin, stream_seed(config.master_seed, Stream::Poisson));
    }
    case DisruptionMode::Explicit:
      return config.events;
  }
  return {};
}

RunResult run_scenario(const ScenarioConfig& config, ExecutionOptions options) {
  config.validate();
  const World world = build_world(config);
  Federation federation = build_federation(config, world);

  RunResult result;
  result.events = build_events(config, world);
  if (result.events.empty()) {
    result.apply_time = result.retract_time = std::min(config.warmup, config.horizon);
  } else {
    result.apply_time = result.events.front().apply_time;
    result.retract_time = result.events.front().retract_time;
    Fnv1a h;
    for (const DisruptionEvent& ev : result.events) {
      result.apply_time = std::min(result.apply_time, ev.apply_time);
      result.retract_time = std::max(result.retract_time, ev.retract_time);
      h.add(pattern_hash(ev.nodes));
    }
    result.pattern_hash = result.events.size() == 1 ? pattern_hash(result.events.front().nodes) : h.value();
  }

  const SyncSchedule schedule{config.factors.tg, config.horizon};
  const auto start = std::chrono::steady_clock::now();
  result.trace = options.sequential_reference
                     ? run_sequential_reference(federation, schedule, result.events)
                     : run(federation, schedule, result.events, {options.threads});
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  result.outcome = evaluate_outcome(result.trace, config.target, result.apply_time,
                                    result.retract_time, config.factors,
                                    elapsed.count() / static_cast<double>(config.horizon));
  return result;
}

std::vector<Timestep> lhs_levels(std::size_t k, Timestep lo, Timestep hi, std::uint64_t seed) {
  if (k == 0) throw RangeTooSmall("level count must be at least 1");
  if (hi < lo || static_cast<std::uint64_t>(hi - lo) + 1 < k) {
    throw RangeTooSmall("range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] holds fewer than " + std::to_string(k) + " integers");
  }
  const auto width = static_cast<std::uint64_t>(hi - lo) + 1;
  Engine engine(seed);
  std::vector<Timestep> levels;
  levels.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    const auto first = lo + static_cast<Timestep>(i * width / k);
    const auto last = lo + static_cast<Timestep>((i + 1) * width / k) - 1;
    levels.push_back(uniform_int(engine, first, last));
  }
  return levels;
}

std::vector<Factors> build_layout(const FactorLevels& levels) {
  std::vector<Factors> layout;
  layout.reserve(levels.ds.size() * levels.rt.size() * levels.tg.size());
  for (std::int64_t ds : levels.ds)
    for (Timestep rt : levels.rt)
      for (Timestep tg : levels.tg) layout.push_back({tg, rt, ds});
  return layout;
}

namespace {

std::string sanitize(std::string message) {
  for (char& c : message) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return message;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ScenarioConfig& base, std::span<const Factors> layout,
                                      const ExperimentOptions& options) {
  const int jobs = options.jobs <= 0 ? available_cores() : options.jobs;
  const bool sequential = jobs == 1;
  std::vector<ResultRow> rows(layout.size());
  std::vector<std::optional<MoPTrace>> traces(layout.size());
  const bool keep_traces = !options.traces_dir.empty();

  auto run_one = [&](std::size_t k) {
    ResultRow& row = rows[k];
    row.run_id = k + 1;
    row.factors = layout[k];
    try {
      ScenarioConfig config = base;
      config.factors = layout[k];
      RunResult r = run_scenario(config, {1, sequential});
      row.spds = r.outcome.spds;
      row.sprt = r.outcome.sprt;
      row.visible = r.outcome.visible;
      row.sec_per_step = r.outcome.sec_per_timestep;
      row.pattern_hash = r.pattern_hash;
      row.status = "ok";
      if (keep_traces) traces[k] = std::move(r.trace);
    } catch (const std::exception& ex) {
      row.status = sanitize(std::string("error: ") + ex.what());
    }
  };

  const auto count = static_cast<std::int64_t>(layout.size());
  if (sequential) {
    for (std::int64_t k = 0; k < count; ++k) run_one(static_cast<std::size_t>(k));
  } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (std::int64_t k = 0; k < count; ++k) run_one(static_cast<std::size_t>(k));
  }

  if (keep_traces) {
    std::filesystem::create_directories(options.traces_dir);
    for (std::size_t k = 0; k < traces.size(); ++k) {
      if (!traces[k]) continue;
      char name[32];
      std::snprintf(name, sizeof name, "trace_%04zu.csv", k + 1);
      write_file_atomic((std::filesystem::path(options.traces_dir) / name).string(), traces[k]->to_csv());
    }
  }
  return rows;
}

std::string format_row(const ResultRow& row, bool include_timing) {
  char buf[256];
  std::string out = std::to_string(row.run_id) + ',' + std::to_string(row.factors.tg) + ',' +
                    std::to_string(row.factors.rt) + ',' + std::to_string(row.factors.ds) + ',';
  if (row.ok()) {
    std::snprintf(buf, sizeof buf, "%.6f", row.spds);
    out += buf;
    out += ',';
    if (row.sprt) out += std::to_string(*row.sprt);
    out += row.visible ? ",true" : ",false";
    out += row.censored() ? ",true," : ",false,";
    if (include_timing) {
      std::snprintf(buf, sizeof buf, "%.6e", row.sec_per_step);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%016" PRIx64 ",", row.pattern_hash);
    out += buf;
  } else {
    out += ",,,,,,";
  }
  out += row.status;
  return out;
}

std::string results_csv(std::span<const ResultRow> rows, bool include_timing) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const ResultRow& row : rows) out += format_row(row, include_timing) + "\n";
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_bool(const std::string& s, std::size_t line, const char* column) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("results line " + std::to_string(line) + ", column " + column +
                    ": expected true or false");
}

}  // namespace

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("results file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw ConfigError("results line 1: unexpected header '" + line + "'");

  std::vector<ResultRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 11) {
      throw ConfigError("results line " + std::to_string(number) + ": expected 11 columns, found " +
                        std::to_string(f.size()));
    }
    ResultRow row;
    try {
      row.run_id = std::stoull(f[0]);
      row.factors = {std::stoll(f[1]), std::stoll(f[2]), std::stoll(f[3])};
      row.status = f[10];
      if (row.ok()) {
        row.spds = std::stod(f[4]);
        if (!f[5].empty()) row.sprt = std::stoll(f[5]);
        row.visible = parse_bool(f[6], number, "visible");
        const bool censored = parse_bool(f[7], number, "censored");
        if (censored == row.sprt.has_value())
          throw ConfigError("results line " + std::to_string(number) +
                            ": censored flag disagrees with sprt_steps");
        row.sec_per_step = f[8].empty() ? 0.0 : std::stod(f[8]);
        row.pattern_hash = std::stoull(f[9], nullptr, 16);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("results line " + std::to_string(number) + ": malformed number");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open results file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results_csv(buf.str());
}

std::vector<TimingSample> timing_profile(const ScenarioConfig& config, std::span<const Timestep> tgs,
                                         int repeats, int threads) {
  std::vector<TimingSample> out;
  for (Timestep tg : tgs) {
    ScenarioConfig c = config;
    c.factors.tg = tg;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(repeats, 1); ++r)
      best = std::min(best, run_scenario(c, {threads, false}).outcome.sec_per_timestep);
    out.push_back({tg, best});
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::filesystem::rename(tmp, target);
}

int available_cores() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace granusim

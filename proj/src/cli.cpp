#include "granusim/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "granusim/analysis.hpp"
#include "granusim/error.hpp"
#include "granusim/experiment.hpp"
#include "granusim/rng.hpp"
#include "granusim/scenario.hpp"

namespace granusim {

namespace {

constexpr const char* kSchemaHelp = R"(Scenario file (JSON; every field optional, unknown fields rejected):
  master_seed          unsigned integer           (default 42; GRANUSIM_SEED overrides, --seed wins)
  horizon              positive integer           (default 400)
  warmup               positive integer           (default 50; disruption onset)
  recovery_headroom    nonnegative integer        (default 200)
  couplings_per_node   positive integer           (default 1)
  align_sync           boolean                    (default false)
  origin, target       "water" | "power" | "business" (defaults water, business)
  factors              {"tg": int, "rt": int, "ds": int}
  levels               {"tg": [int...], "rt": [int...], "ds": [int...]} ascending
  networks             [{"network": name, "nodes": int, "edges": int, "lag": int,
                         "weights": {"internal": x, "in_network": x, "external": x}}]
  disruption           {"mode": "fixed" | "poisson" | "explicit", "rate": x,
                        "min_size": int, "max_size": int, "min_recovery": int,
                        "max_recovery": int,
                        "events": [{"apply_time": int, "retract_time": int,
                                    "target": name, "nodes": [int...]}]}
)";

struct Overrides {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<Timestep> tg, rt, horizon;
  std::optional<std::int64_t> ds;
  bool align_sync = false;
};

void add_scenario_options(CLI::App& cmd, Overrides& o, bool factors) {
  cmd.add_option("--scenario", o.scenario, "Scenario file")->check(CLI::ExistingFile);
  cmd.add_option("--seed", o.seed, "Master seed override");
  cmd.add_option("--horizon", o.horizon, "Horizon override")->check(CLI::PositiveNumber);
  cmd.add_flag("--align-sync", o.align_sync, "Start the disruption on a sync instant");
  if (factors) {
    cmd.add_option("--tg", o.tg, "Time granularity")->check(CLI::PositiveNumber);
    cmd.add_option("--rt", o.rt, "Recovery time")->check(CLI::PositiveNumber);
    cmd.add_option("--ds", o.ds, "Disruption size")->check(CLI::PositiveNumber);
  }
}

std::uint64_t parse_env_seed(const char* text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const unsigned long long v = std::stoull(s, &used, 0);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("GRANUSIM_SEED: not an unsigned integer: '") + text + "'");
  }
}

ScenarioConfig resolve_config(const Overrides& o) {
  ScenarioConfig config = o.scenario.empty() ? ScenarioConfig{} : load_scenario(o.scenario);
  if (const char* env = std::getenv("GRANUSIM_SEED"); env && *env) config.master_seed = parse_env_seed(env);
  if (o.seed) config.master_seed = *o.seed;
  if (o.horizon) config.horizon = *o.horizon;
  if (o.tg) config.factors.tg = *o.tg;
  if (o.rt) config.factors.rt = *o.rt;
  if (o.ds) config.factors.ds = *o.ds;
  if (o.align_sync) config.align_sync = true;
  config.poisson.horizon = config.horizon;
  config.validate();
  return config;
}

std::string print_outcome(const RunResult& r) {
  std::ostringstream s;
  char buf[64];
  s << "tg=" << r.outcome.factors.tg << "\n"
    << "rt=" << r.outcome.factors.rt << "\n"
    << "ds=" << r.outcome.factors.ds << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", r.outcome.spds);
  s << "spds_pct=" << buf << "\n";
  s << "sprt_steps=" << (r.outcome.sprt ? std::to_string(*r.outcome.sprt) : std::string()) << "\n";
  s << "visible=" << (r.outcome.visible ? "true" : "false") << "\n";
  s << "censored=" << (r.outcome.censored() ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof buf, "%.6e", r.outcome.sec_per_timestep);
  s << "sec_per_step=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(r.pattern_hash));
  s << "pattern_hash=" << buf << "\n";
  return s.str();
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"granusim: synchronization-granularity experiments on coupled infrastructure networks"};
  app.footer(kSchemaHelp);
  app.require_subcommand(1);

  Overrides gen_o, run_o, exp_o;
  std::string gen_dir, run_trace, exp_out, exp_traces;
  int run_jobs = available_cores();
  int exp_jobs = available_cores();
  std::optional<std::uint64_t> lhs_seed;

  auto* gen = app.add_subcommand("generate", "Write topologies, lifelines and the disruption schedule");
  add_scenario_options(*gen, gen_o, true);
  gen->add_option("--out-dir", gen_dir, "Output directory")->required();

  auto* runc = app.add_subcommand("run", "Run one scenario and print its outcome");
  add_scenario_options(*runc, run_o, true);
  runc->add_option("--trace", run_trace, "Write the MoP trace CSV here");
  runc->add_option("--jobs", run_jobs, "Federates stepped concurrently (1 = sequential reference)")
      ->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("experiment", "Run the factorial layout to a results CSV");
  add_scenario_options(*exp, exp_o, false);
  exp->add_option("--out", exp_out, "Results CSV")->required();
  exp->add_option("--traces", exp_traces, "Directory for per-run MoP traces");
  exp->add_option("--jobs", exp_jobs, "Concurrent runs (1 = sequential reference)")->check(CLI::PositiveNumber);
  exp->add_option("--lhs-seed", lhs_seed, "Draw fresh LHS levels from this seed instead of the defaults");

  std::string an_in, an_out, an_curve, an_scatter;
  auto* an = app.add_subcommand("analyze", "Fit variance shares, visibility and ratio models");
  an->add_option("--in", an_in, "Results CSV")->required()->check(CLI::ExistingFile);
  an->add_option("--out", an_out, "Report file (default: standard output)");
  an->add_option("--curve", an_curve, "Write ratio,probability samples here");
  an->add_option("--scatter", an_scatter, "Write rt_over_tg,sprt_over_tg points here");

  double rec_rt = 0.0, rec_p = 0.5;
  std::string rec_report, rec_in;
  std::optional<double> rec_intercept, rec_slope;
  auto* rec = app.add_subcommand("recommend", "Largest time granularity that keeps a disruption visible");
  rec->add_option("--rt", rec_rt, "Expected recovery time")->required()->check(CLI::PositiveNumber);
  rec->add_option("--p", rec_p, "Target visibility likelihood")->check(CLI::Range(1e-12, 1.0 - 1e-12));
  auto* src_report = rec->add_option("--report", rec_report, "Analysis report")->check(CLI::ExistingFile);
  auto* src_in = rec->add_option("--in", rec_in, "Results CSV to fit")->check(CLI::ExistingFile);
  auto* src_a = rec->add_option("--intercept", rec_intercept, "Logistic intercept");
  auto* src_b = rec->add_option("--slope", rec_slope, "Logistic slope");
  src_report->excludes(src_in)->excludes(src_a)->excludes(src_b);
  src_in->excludes(src_a)->excludes(src_b);
  src_a->needs(src_b);
  src_b->needs(src_a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*gen) {
      const ScenarioConfig config = resolve_config(gen_o);
      const World world = build_world(config);
      const std::filesystem::path dir(gen_dir);
      std::filesystem::create_directories(dir);
      for (const Topology& t : world.topologies) {
        write_file_atomic((dir / ("topology_" + std::string(to_string(t.network)) + ".json")).string(),
                          serialize(t));
      }
      write_file_atomic((dir / "interdependencies.json").string(), serialize(world.map));
      nlohmann::json events = nlohmann::json::array();
      for (const DisruptionEvent& ev : build_events(config, world)) events.push_back(to_json(ev));
      write_file_atomic((dir / "events.json").string(), nlohmann::json{{"events", events}}.dump(2) + "\n");
      write_file_atomic((dir / "scenario.json").string(), to_json(config).dump(2) + "\n");
      out << "wrote " << world.topologies.size() << " topologies, " << world.map.couplings.size()
          << " couplings to " << dir.string() << "\n";
    } else if (*runc) {
      const ScenarioConfig config = resolve_config(run_o);
      const RunResult r = run_scenario(config, {run_jobs, run_jobs == 1});
      if (!run_trace.empty()) write_file_atomic(run_trace, r.trace.to_csv());
      out << print_outcome(r);
    } else if (*exp) {
      ScenarioConfig config = resolve_config(exp_o);
      if (lhs_seed) {
        const std::uint64_t s = *lhs_seed;
        config.levels.tg = lhs_levels(5, 1, 30, stream_seed(s, "lhs/tg"));
        config.levels.rt = lhs_levels(5, 1, 30, stream_seed(s, "lhs/rt"));
        config.levels.ds = lhs_levels(5, 7, static_cast<Timestep>(config.spec(config.origin).nodes) - 1,
                                      stream_seed(s, "lhs/ds"));
        config.validate();
      }
      const auto layout = build_layout(config.levels);
      const auto rows = run_experiment(config, layout, {exp_jobs, exp_traces});
      write_file_atomic(exp_out, results_csv(rows));
      std::size_t failed = 0;
      for (const auto& row : rows) failed += row.ok() ? 0 : 1;
      out << "wrote " << rows.size() << " rows to " << exp_out;
      if (failed) out << " (" << failed << " failed)";
      out << "\n";
    } else if (*an) {
      const auto rows = read_results_csv(an_in);
      const AnalysisReport report = analyze(rows);
      const std::string text = to_json(report).dump(2) + "\n";
      if (an_out.empty()) {
        out << text;
      } else {
        write_file_atomic(an_out, text);
      }
      if (!an_curve.empty()) write_file_atomic(an_curve, visibility_curve_csv(report.visibility, 0.0, 4.0, 81));
      if (!an_scatter.empty()) write_file_atomic(an_scatter, ratio_scatter_csv(rows));
    } else if (*rec) {
      LogisticVisibilityModel model;
      if (!rec_report.empty()) {
        std::ifstream in(rec_report);
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& ex) {
          throw ConfigError(rec_report + ": " + ex.what());
        }
        model = visibility_from_report(doc);
      } else if (!rec_in.empty()) {
        model = fit_visibility_logistic(read_results_csv(rec_in));
      } else if (rec_intercept && rec_slope) {
        model.intercept = *rec_intercept;
        model.slope = *rec_slope;
      } else {
        throw ConfigError("recommend needs --report, --in, or --intercept with --slope");
      }
      out << recommend_tg(model, rec_rt, rec_p) << "\n";
    }
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << "\n\n" << kSchemaHelp;
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace granusim

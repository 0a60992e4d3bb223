#include "granusim/disruption.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "granusim/error.hpp"
#include "granusim/experiment.hpp"

namespace granusim {
namespace {

const Topology& water() {
  static const Topology t = generate_topology(NetworkId::Water, 22, 77, 1);
  return t;
}

TEST(FixedPattern, FullSizeIsEveryNode) {
  const auto nodes = fixed_pattern(22, water(), 5);
  std::vector<NodeIndex> all(22);
  for (NodeIndex i = 0; i < 22; ++i) all[i] = i;
  EXPECT_EQ(nodes, all);
}

TEST(FixedPattern, EightNodesDistinctSortedAndRepeatable) {
  const auto a = fixed_pattern(8, water(), 99);
  ASSERT_EQ(a.size(), 8u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<NodeIndex>(a.begin(), a.end()).size(), 8u);
  EXPECT_EQ(fixed_pattern(8, water(), 99), a);
  EXPECT_NE(fixed_pattern(8, water(), 100), a);
}

TEST(FixedPattern, GrowingSizesAreNested) {
  std::vector<NodeIndex> prev;
  for (std::size_t ds = 1; ds <= 22; ++ds) {
    const auto cur = fixed_pattern(ds, water(), 3);
    EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end())) << ds;
    prev = cur;
  }
}

TEST(FixedPattern, SizeErrors) {
  EXPECT_THROW(fixed_pattern(23, water(), 1), SizeOverflow);
  EXPECT_THROW(fixed_pattern(0, water(), 1), PreconditionError);
}

// Changing anything but (seed, ds, topology) leaves the experiment's pattern alone.
TEST(FixedPattern, StableAcrossScenarioFields) {
  ScenarioConfig base;
  base.factors = {12, 9, 8};
  const World world = build_world(base);
  const auto reference = build_events(base, world).at(0).nodes;
  for (Timestep tg : {2, 14, 27}) {
    for (Timestep rt : {2, 13, 22}) {
      ScenarioConfig c = base;
      c.factors.tg = tg;
      c.factors.rt = rt;
      c.align_sync = (tg + rt) % 2 == 0;
      c.horizon = 500;
      c.networks[index_of(NetworkId::Business)].params.lag = 3;
      EXPECT_EQ(build_events(c, build_world(c)).at(0).nodes, reference);
    }
  }
}

TEST(PatternHash, DependsOnContent) {
  EXPECT_EQ(pattern_hash({1, 2, 3}), pattern_hash({1, 2, 3}));
  EXPECT_NE(pattern_hash({1, 2, 3}), pattern_hash({1, 2, 4}));
  EXPECT_NE(pattern_hash({1, 2}), pattern_hash({1, 2, 0}));
}

DisruptionStreamConfig stream(double rate, Timestep horizon) {
  DisruptionStreamConfig c;
  c.rate = rate;
  c.horizon = horizon;
  return c;
}

TEST(PoissonStream, VanishingRateIsEmpty) {
  EXPECT_TRUE(poisson_stream(stream(1e-12, 1000), water(), 7).empty());
}

TEST(PoissonStream, CountNearMean) {
  const auto events = poisson_stream(stream(0.1, 10000), water(), 12345);
  const double expected = 0.1 * 10000;
  EXPECT_LE(std::abs(static_cast<double>(events.size()) - expected), 3.0 * std::sqrt(expected))
      << events.size();
}

TEST(PoissonStream, InterArrivalMean) {
  const double rate = 0.1;
  const auto events = poisson_stream(stream(rate, 1'050'000), water(), 2718);
  ASSERT_GE(events.size(), 100000u);
  // Timesteps are ceilings of the arrival clock, so the sum of gaps
  // telescopes to the span between first and last arrival.
  const std::size_t k = 100000;
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) sum += static_cast<double>(events[i].apply_time - events[i - 1].apply_time);
  EXPECT_NEAR(sum / static_cast<double>(k), 1.0 / rate, 0.05 / rate);
}

TEST(PoissonStream, Deterministic) {
  DisruptionStreamConfig c = stream(0.05, 2000);
  c.max_size = 6;
  c.max_recovery = 30;
  EXPECT_EQ(poisson_stream(c, water(), 9), poisson_stream(c, water(), 9));
  EXPECT_NE(poisson_stream(c, water(), 9), poisson_stream(c, water(), 10));
}

TEST(PoissonStream, EventsSatisfyInvariantsUnderFuzz) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    DisruptionStreamConfig c;
    c.rate = std::exp(std::uniform_real_distribution<double>(-7.0, 0.0)(gen));
    c.min_size = 1 + gen() % 22;
    c.max_size = c.min_size + gen() % (23 - c.min_size);
    c.min_recovery = 1 + static_cast<Timestep>(gen() % 10);
    c.max_recovery = c.min_recovery + static_cast<Timestep>(gen() % 40);
    c.horizon = 2 + static_cast<Timestep>(gen() % 3000);
    for (const DisruptionEvent& ev : poisson_stream(c, water(), gen())) {
      ASSERT_NO_THROW(ev.validate(water(), c.horizon));
      EXPECT_GE(ev.nodes.size(), c.min_size);
      EXPECT_LE(ev.nodes.size(), c.max_size);
      EXPECT_LE(ev.retract_time, c.horizon);
      if (ev.retract_time < c.horizon) {
        EXPECT_GE(ev.recovery_time(), c.min_recovery);
        EXPECT_LE(ev.recovery_time(), c.max_recovery);
      }
    }
  }
}

TEST(PoissonStream, InvalidConfig) {
  EXPECT_THROW(poisson_stream(stream(0.0, 100), water(), 1), PreconditionError);
  EXPECT_THROW(poisson_stream(stream(-1.0, 100), water(), 1), PreconditionError);
  DisruptionStreamConfig c = stream(0.1, 100);
  c.max_size = 30;
  EXPECT_THROW(poisson_stream(c, water(), 1), PreconditionError);
}

TEST(DisruptionEvent, ValidateAndJson) {
  const DisruptionEvent ev{10, 19, NetworkId::Water, {1, 5, 7}};
  EXPECT_EQ(ev.recovery_time(), 9);
  EXPECT_NO_THROW(ev.validate(water(), 19));
  EXPECT_THROW(ev.validate(water(), 18), PreconditionError);
  EXPECT_EQ(event_from_json(to_json(ev)), ev);
  DisruptionEvent dup = ev;
  dup.nodes = {1, 1};
  EXPECT_THROW(dup.validate(water(), 100), PreconditionError);
  DisruptionEvent empty = ev;
  empty.nodes.clear();
  EXPECT_THROW(empty.validate(water(), 100), PreconditionError);
  EXPECT_THROW(event_from_json(nlohmann::json{{"apply_time", "x"}}), ConfigError);
}

}  // namespace
}  // namespace granusim

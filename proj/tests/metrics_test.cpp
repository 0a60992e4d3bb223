#include "granusim/metrics.hpp"

#include <random>

#include <gtest/gtest.h>

#include "granusim/error.hpp"
#include "test_support.hpp"

namespace granusim {
namespace {

// Trace whose business series is `pct` (percent of a 100-unit baseline).
MoPTrace business_trace(const std::vector<double>& pct) {
  MoPTrace trace(static_cast<Timestep>(pct.size()) - 1);
  trace.add_network(NetworkId::Business);
  for (std::size_t t = 0; t < pct.size(); ++t)
    trace.record(NetworkId::Business, static_cast<Timestep>(t), pct[t]);
  trace.set_baseline(NetworkId::Business, 100.0);
  return trace;
}

TEST(Mop, Definition) {
  Federate f(testing::line_topology(NetworkId::Water, 22), {});
  EXPECT_EQ(mop(f, 22.0), 100.0);
  std::vector<NodeIndex> all(22);
  for (NodeIndex i = 0; i < 22; ++i) all[i] = i;
  f.apply_disruption(all);
  EXPECT_EQ(mop(f, 22.0), 0.0);
}

TEST(Mop, EightOfTwentyTwoDown) {
  Federate f(generate_topology(NetworkId::Water, 22, 77, 3), {});
  const std::vector<NodeIndex> eight{0, 1, 2, 3, 4, 5, 6, 7};
  f.apply_disruption(eight);
  EXPECT_NEAR(mop(f, 22.0), 100.0 * 14.0 / 22.0, 1e-12);
  EXPECT_NEAR(mop(f, 22.0), 63.64, 0.005);
}

TEST(Mop, ZeroBaseline) {
  EXPECT_THROW(mop_percent(3.0, 0.0), ZeroBaseline);
  const MoPTrace t = [] {
    MoPTrace tr(2);
    tr.add_network(NetworkId::Power);
    tr.set_baseline(NetworkId::Power, 0.0);
    return tr;
  }();
  EXPECT_THROW(static_cast<void>(t.percent(NetworkId::Power, 1)), ZeroBaseline);
}

TEST(MopTrace, CsvFormat) {
  MoPTrace t(1);
  t.add_network(NetworkId::Water);
  t.add_network(NetworkId::Business);
  t.record(NetworkId::Water, 0, 22.0);
  t.record(NetworkId::Water, 1, 11.0);
  t.record(NetworkId::Business, 0, 3.0);
  t.record(NetworkId::Business, 1, 2.0);
  t.set_baseline(NetworkId::Water, 22.0);
  t.set_baseline(NetworkId::Business, 3.0);
  EXPECT_EQ(t.to_csv(),
            "t,mop_water,mop_power,mop_business\n"
            "0,100.000000,,100.000000\n"
            "1,50.000000,,66.666667\n");
}

TEST(Spds, Examples) {
  EXPECT_EQ(compute_spds(business_trace(std::vector<double>(10, 100.0)), NetworkId::Business, 2), 0.0);
  EXPECT_DOUBLE_EQ(compute_spds(business_trace({100, 100, 80, 62, 90, 100}), NetworkId::Business, 1), 38.0);
  // Dips before apply_time do not count.
  EXPECT_DOUBLE_EQ(compute_spds(business_trace({50, 100, 97, 100}), NetworkId::Business, 1), 3.0);
  EXPECT_THROW(compute_spds(business_trace({100, 100}), NetworkId::Business, 2), PreconditionError);
}

TEST(Spds, InvariantUnderAppendedRecoveredSamples) {
  std::vector<double> series{100, 100, 70, 81, 96, 99.5};
  const double base = compute_spds(business_trace(series), NetworkId::Business, 2);
  for (int k = 0; k < 5; ++k) {
    series.push_back(100.0);
    EXPECT_EQ(compute_spds(business_trace(series), NetworkId::Business, 2), base);
  }
}

TEST(Sprt, Examples) {
  EXPECT_EQ(compute_sprt(business_trace({100, 100, 99.5, 100}), NetworkId::Business, 1), 0);
  std::vector<double> s(20, 100.0);
  for (int t = 3; t < 10 + 7; ++t) s[t] = 80.0;
  s[16] = 98.99;
  s[17] = 99.0;
  EXPECT_EQ(compute_sprt(business_trace(s), NetworkId::Business, 10), 7);
  std::vector<double> pinned(30, 90.0);
  pinned[0] = 100.0;
  EXPECT_FALSE(compute_sprt(business_trace(pinned), NetworkId::Business, 5).has_value());
}

TEST(Sprt, MonotoneUnderDomination) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(85.0, 100.0);
  std::uniform_real_distribution<double> lift(0.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> low(40), high(40);
    for (std::size_t t = 0; t < 40; ++t) {
      low[t] = u(gen);
      high[t] = std::min(100.0, low[t] + lift(gen));
    }
    const auto a = compute_sprt(business_trace(high), NetworkId::Business, 10);
    const auto b = compute_sprt(business_trace(low), NetworkId::Business, 10);
    if (!b) continue;
    ASSERT_TRUE(a.has_value());
    EXPECT_LE(*a, *b);
  }
}

TEST(Visibility, Threshold) {
  static_assert(!classify_visibility(0.0));
  static_assert(classify_visibility(38.0));
  static_assert(!classify_visibility(5.0));
  static_assert(classify_visibility(5.000001));
}

TEST(Visibility, NeverVisibleWhenMinimumAbove95) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(95.0 + 1e-9, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(25);
    for (double& v : s) v = u(gen);
    EXPECT_FALSE(classify_visibility(compute_spds(business_trace(s), NetworkId::Business, 0)));
  }
}

TEST(Outcome, Evaluate) {
  std::vector<double> s(30, 100.0);
  for (int t = 12; t < 20; ++t) s[t] = 60.0;
  const RunOutcome o = evaluate_outcome(business_trace(s), NetworkId::Business, 10, 15, {3, 5, 8}, 1e-6);
  EXPECT_DOUBLE_EQ(o.spds, 40.0);
  EXPECT_EQ(o.sprt, 5);
  EXPECT_TRUE(o.visible);
  EXPECT_FALSE(o.censored());
  EXPECT_EQ(o.factors, (Factors{3, 5, 8}));
}

}  // namespace
}  // namespace granusim

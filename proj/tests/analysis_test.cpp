#include "granusim/analysis.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "granusim/error.hpp"
#include "oracles.hpp"

namespace granusim {
namespace {

ResultRow row(Timestep tg, Timestep rt, std::int64_t ds, double spds, std::optional<Timestep> sprt = 0) {
  ResultRow r;
  r.factors = {tg, rt, ds};
  r.spds = spds;
  r.sprt = sprt;
  r.visible = spds > 5.0;
  return r;
}

std::vector<ResultRow> grid(const std::function<double(Timestep, Timestep, std::int64_t)>& f) {
  std::vector<ResultRow> rows;
  for (Timestep tg : {2, 5, 9, 14})
    for (Timestep rt : {1, 4, 8})
      for (std::int64_t ds : {3, 6, 10}) rows.push_back(row(tg, rt, ds, f(tg, rt, ds)));
  return rows;
}

TEST(Terms, ParseAndEvaluate) {
  const Factors f{4, 10, 3};
  EXPECT_EQ(Term::parse("tg").evaluate(f), 4.0);
  EXPECT_EQ(Term::parse("tg:rt").evaluate(f), 40.0);
  EXPECT_EQ(Term::parse("rt:ds").evaluate(f), 30.0);
  EXPECT_EQ(Term::parse("rt/tg").evaluate(f), 2.5);
  EXPECT_THROW(Term::parse("tg:x"), ConfigError);
  std::vector<std::string> labels;
  for (const Term& t : default_terms()) labels.push_back(t.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"tg", "rt", "ds", "tg:rt", "tg:ds", "rt:ds"}));
}

TEST(VarianceShares, PureSingleFactor) {
  const auto rows = grid([](Timestep tg, Timestep, std::int64_t) { return 3.0 * tg; });
  const auto terms = default_terms();
  const auto rep = variance_shares(rows, Response::Spds, terms);
  EXPECT_NEAR(rep.share("tg"), 1.0, 1e-12);
  for (const char* t : {"rt", "ds", "tg:rt", "tg:ds", "rt:ds"}) EXPECT_NEAR(rep.share(t), 0.0, 1e-12) << t;
  EXPECT_NEAR(rep.residual_share, 0.0, 1e-12);
}

TEST(VarianceShares, TwoFactorsDominateThird) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 0.5);
  const auto rows = grid([&](Timestep tg, Timestep rt, std::int64_t) { return tg + rt + noise(gen); });
  const auto terms = default_terms();
  const auto rep = variance_shares(rows, Response::Spds, terms);
  EXPECT_GT(rep.share("tg"), 10 * rep.share("ds"));
  EXPECT_GT(rep.share("rt"), 10 * rep.share("ds"));
}

TEST(VarianceShares, SharesSumToOne) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = grid([&](Timestep, Timestep, std::int64_t) { return u(gen); });
    const auto terms = default_terms();
    const auto rep = variance_shares(rows, Response::Spds, terms);
    double sum = rep.residual_share;
    for (const TermShare& s : rep.terms) {
      EXPECT_GE(s.share, 0.0);
      sum += s.share;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(VarianceShares, MatchesProjectionOracleOnSmallData) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t p = 1 + gen() % 5;
    const std::size_t n = p + 1 + gen() % (8 - p);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<double> y(n);
    for (auto& c : cols)
      for (double& v : c) v = u(gen);
    for (double& v : y) v = u(gen);
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < p; ++j) labels.push_back("c" + std::to_string(j));

    const auto rep = sequential_shares(y, cols, labels);
    ASSERT_LE(n, 8u);
    EXPECT_NEAR(rep.total_ss, static_cast<double>(testing::brute_rss(y, cols, 0)), 1e-9);
    for (std::size_t j = 0; j < p; ++j) {
      const double ss = static_cast<double>(testing::brute_rss(y, cols, j) - testing::brute_rss(y, cols, j + 1));
      EXPECT_NEAR(rep.terms[j].sum_of_squares, ss, 1e-9) << "trial " << trial << " term " << j;
    }
    EXPECT_NEAR(rep.residual_ss, static_cast<double>(testing::brute_rss(y, cols, p)), 1e-9);
  }
}

TEST(VarianceShares, Errors) {
  const std::vector<double> y{1, 2, 3, 5};
  const std::vector<std::vector<double>> dup{{1, 2, 3, 4}, {2, 4, 6, 8}};
  EXPECT_THROW(sequential_shares(y, dup, {"a", "b"}), Collinear);
  const std::vector<std::vector<double>> constant{{7, 7, 7, 7}};
  EXPECT_THROW(sequential_shares(y, constant, {"a"}), Collinear);
  const std::vector<std::vector<double>> wide{{1, 2, 3, 4}, {1, 4, 9, 16}, {1, 8, 27, 64}, {1, 0, 1, 0}};
  EXPECT_THROW(sequential_shares(y, wide, {"a", "b", "c", "d"}), Collinear);
  const std::vector<double> flat{2, 2, 2, 2};
  const std::vector<std::vector<double>> one{{1, 2, 3, 4}};
  EXPECT_THROW(sequential_shares(flat, one, {"a"}), Degenerate);
}

TEST(VarianceShares, CensoredAndFailedRowsDropped) {
  auto rows = grid([](Timestep tg, Timestep rt, std::int64_t ds) { return tg * 1.0 + rt + ds; });
  for (auto& r : rows) r.sprt = r.factors.tg + 2 * r.factors.rt;
  rows[0].sprt.reset();
  rows[1].status = "error: boom";
  const std::vector<Term> terms{Term::parse("tg"), Term::parse("rt")};
  EXPECT_EQ(variance_shares(rows, Response::Sprt, terms).rows, rows.size() - 2);
  EXPECT_EQ(variance_shares(rows, Response::Spds, terms).rows, rows.size() - 1);
}

TEST(Logistic, SymmetricDataGivesMidpoint) {
  const double delta = 0.2;
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (int k = 0; k < 10; ++k) {
    x.push_back(0.5 - delta);
    y.push_back(0);
    x.push_back(0.5 + delta);
    y.push_back(1);
  }
  // Overlap keeps the optimum finite and slope-sensitive.
  x.push_back(0.5 - delta);
  y.push_back(1);
  x.push_back(0.5 + delta);
  y.push_back(0);
  const auto m = fit_logistic(x, y);
  EXPECT_GT(m.slope, 0.0);
  EXPECT_NEAR(m.ratio_at(0.5), 0.5, 1e-6);
}

TEST(Logistic, SeparableSymmetricDataStillCentred) {
  const std::vector<double> x{0.3, 0.3, 0.3, 0.7, 0.7, 0.7};
  const std::vector<std::uint8_t> y{0, 0, 0, 1, 1, 1};
  const auto m = fit_logistic(x, y);
  EXPECT_NEAR(m.ratio_at(0.5), 0.5, 1e-6);
  EXPECT_GT(m.slope, 0.0);
}

struct Dataset {
  std::vector<double> x;
  std::vector<std::uint8_t> y;
};

Dataset noisy_logistic(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(gen);
    d.x.push_back(x);
    d.y.push_back(unit(gen) < 1.0 / (1.0 + std::exp(-(-2.0 + 2.5 * x))) ? 1 : 0);
  }
  return d;
}

TEST(Logistic, GradientVanishesAndMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Dataset d = noisy_logistic(seed, 150);
    const auto m = fit_logistic(d.x, d.y);
    const auto g = penalized_gradient(m.intercept, m.slope, m.ridge, d.x, d.y);
    EXPECT_LT(std::hypot(g[0], g[1]), 1e-8) << "seed " << seed;

    const double h = 1e-5;
    auto ll = [&](double a, double b) { return penalized_log_likelihood(a, b, m.ridge, d.x, d.y); };
    for (const auto& [a, b] : {std::pair{m.intercept, m.slope}, std::pair{0.3, -0.7}, std::pair{-1.0, 2.0}}) {
      const auto ga = penalized_gradient(a, b, m.ridge, d.x, d.y);
      const double fd0 = (ll(a + h, b) - ll(a - h, b)) / (2 * h);
      const double fd1 = (ll(a, b + h) - ll(a, b - h)) / (2 * h);
      EXPECT_NEAR(ga[0], fd0, 1e-6);
      EXPECT_NEAR(ga[1], fd1, 1e-6);
    }
  }
}

TEST(Logistic, DegenerateLabels) {
  const std::vector<double> x{0.1, 0.5, 2.0};
  const std::vector<std::uint8_t> all_visible{1, 1, 1};
  EXPECT_THROW(fit_logistic(x, all_visible), Degenerate);
  std::vector<ResultRow> rows{row(2, 9, 8, 10.0), row(12, 9, 8, 12.0)};
  EXPECT_THROW(fit_visibility_logistic(rows), Degenerate);
}

TEST(Logistic, VisibilityFitThresholdAndReciprocal) {
  std::vector<ResultRow> rows;
  for (Timestep tg : {2, 4, 8, 16})
    for (Timestep rt : {1, 3, 6, 12, 24}) {
      const bool visible = rt * 10 >= 9 * tg;
      rows.push_back(row(tg, rt, 8 + static_cast<std::int64_t>(rows.size() % 3), visible ? 20.0 : 1.0,
                         visible ? rt + tg / 2 : 0));
    }
  rows.push_back(row(4, 3, 9, 20.0, 5));  // one overlap
  const auto m = fit_visibility_logistic(rows);
  EXPECT_GT(m.slope, 0.0);
  const double x50 = m.ratio_at(0.5);
  EXPECT_GT(x50, 0.375);
  EXPECT_LT(x50, 1.5);
  EXPECT_DOUBLE_EQ(m.probability(x50), 0.5);
  const AnalysisReport rep = analyze(rows);
  const auto doc = to_json(rep);
  EXPECT_DOUBLE_EQ(doc["visibility_logistic"]["max_tg_per_rt_at_p50"].get<double>(), 1.0 / x50);
}

TEST(Linear, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 8};
  const auto m = fit_linear(x, y);
  EXPECT_NEAR(m.slope, 2.0, 1e-12);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
  EXPECT_NEAR(m.r_squared, 1.0, 1e-12);
}

TEST(Linear, ThreePointHandExample) {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{1, 3, 5};
  const auto m = fit_linear(x, y);
  EXPECT_NEAR(m.slope, 2.0, 1e-12);
  EXPECT_NEAR(m.intercept, -1.0, 1e-12);
}

TEST(Linear, MatchesNormalEquations) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(gen);
      y[i] = 0.7 * x[i] + u(gen);
    }
    const testing::LineFit ref = testing::normal_equations(x, y);
    const auto m = fit_linear(x, y);
    EXPECT_NEAR(m.slope, ref.slope, 1e-10);
    EXPECT_NEAR(m.intercept, ref.intercept, 1e-10);
    EXPECT_GE(m.r_squared, 0.0);
    EXPECT_LE(m.r_squared, 1.0);
  }
}

TEST(Linear, DegenerateAndInverse) {
  const std::vector<double> x{2, 2, 2};
  const std::vector<double> y{1, 2, 3};
  EXPECT_THROW(fit_linear(x, y), Degenerate);
  RatioLinearModel m;
  m.intercept = 0.5;
  m.slope = 2.0;
  // sprt/tg = 0.5 + 2 * rt/tg; tg 4, rt 6 -> sprt = 14.
  EXPECT_DOUBLE_EQ(m.estimate_rt(14.0, 4.0), 6.0);
}

TEST(Linear, RatioFitSkipsCensored) {
  std::vector<ResultRow> rows{row(2, 4, 8, 10, 6), row(4, 4, 8, 10, 8), row(8, 4, 8, 10, 12),
                              row(8, 2, 8, 10, std::nullopt)};
  const auto m = fit_ratio_linear(rows);
  EXPECT_EQ(m.rows, 3u);
  // (rt/tg, sprt/tg) = (2, 3), (1, 2), (0.5, 1.5): y = 1 + x.
  EXPECT_NEAR(m.slope, 1.0, 1e-12);
  EXPECT_NEAR(m.intercept, 1.0, 1e-12);
}

LogisticVisibilityModel model_with_threshold(double x50) {
  LogisticVisibilityModel m;
  m.intercept = -x50;
  m.slope = 1.0;
  return m;
}

TEST(Recommend, Examples) {
  EXPECT_EQ(recommend_tg(model_with_threshold(0.88), 22.0, 0.5), 25);
  EXPECT_EQ(recommend_tg(model_with_threshold(3.0), 2.0, 0.5), 1);
  EXPECT_EQ(recommend_tg(model_with_threshold(0.88), 22.0, 1.0 - 1e-12), 1);
  LogisticVisibilityModel flat;
  EXPECT_THROW(recommend_tg(flat, 10.0, 0.5), Degenerate);
  EXPECT_THROW(recommend_tg(model_with_threshold(0.88), 10.0, 1.0), PreconditionError);
  EXPECT_THROW(recommend_tg(model_with_threshold(-1.0), 10.0, 0.5), Degenerate);
}

TEST(Report, DeterministicJsonAndCsvs) {
  auto rows = grid([](Timestep tg, Timestep rt, std::int64_t ds) { return rt > tg ? 10.0 + ds : 1.0 + 0.1 * tg; });
  for (auto& r : rows) r.sprt = 2 * r.factors.tg + r.factors.rt;
  const std::string a = to_json(analyze(rows)).dump(2);
  EXPECT_EQ(a, to_json(analyze(rows)).dump(2));
  const auto m = visibility_from_report(nlohmann::json::parse(a));
  EXPECT_EQ(m.slope, analyze(rows).visibility.slope);
  const std::string curve = visibility_curve_csv(m, 0.0, 4.0, 5);
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "ratio,probability");
  const std::string scatter = ratio_scatter_csv(rows);
  EXPECT_EQ(scatter.substr(0, scatter.find('\n')), "rt_over_tg,sprt_over_tg");
  EXPECT_THROW(visibility_from_report(nlohmann::json::object()), ConfigError);
}

}  // namespace
}  // namespace granusim

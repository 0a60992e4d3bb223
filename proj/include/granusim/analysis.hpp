#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "granusim/experiment.hpp"

namespace granusim {

enum class Covariate : std::uint8_t { Tg, Rt, Ds, RtOverTg };

/// A model term: the product of one or more covariates ("tg", "tg:rt", "rt/tg").
struct Term {
  std::string label;
  std::vector<Covariate> factors;

  static Term parse(std::string_view label);
  double evaluate(const Factors& f) const;
};

/// tg, rt, ds, tg:rt, tg:ds, rt:ds, in that order.
std::vector<Term> default_terms();

enum class Response : std::uint8_t { Spds, Sprt, SprtOverTg };
std::string_view to_string(Response response) noexcept;

struct TermShare {
  std::string term;
  double sum_of_squares = 0.0;
  double share = 0.0;
};

/// Sequential (Type I) decomposition of the total sum of squares.
struct VarianceShareReport {
  std::string response;
  std::size_t rows = 0;
  double total_ss = 0.0;
  std::vector<TermShare> terms;
  double residual_ss = 0.0;
  double residual_share = 0.0;

  double share(std::string_view term) const;
  double explained_share() const noexcept { return 1.0 - residual_share; }
};

/// Least-squares fit of y on an intercept plus `columns`, entered in order.
/// Throws Collinear when a column adds nothing new, Degenerate when y is constant.
VarianceShareReport sequential_shares(std::span<const double> y,
                                      const std::vector<std::vector<double>>& columns,
                                      const std::vector<std::string>& labels,
                                      std::string response = "y");

/// Censored rows are dropped for the SPRT responses; failed rows always.
VarianceShareReport variance_shares(std::span<const ResultRow> rows, Response response,
                                    std::span<const Term> terms);

inline constexpr double kLogisticRidge = 1e-6;

/// P(visible) = 1 / (1 + exp(-(intercept + slope * rt/tg))).
struct LogisticVisibilityModel {
  double intercept = 0.0;
  double slope = 0.0;
  double ridge = kLogisticRidge;
  int iterations = 0;
  std::size_t rows = 0;

  double probability(double ratio) const noexcept;
  /// Ratio at which the predicted probability equals p. Throws Degenerate if slope is 0.
  double ratio_at(double p) const;
};

/// Penalized log-likelihood: sum of Bernoulli log-likelihoods minus
/// ridge/2 * slope^2. The intercept is not penalized.
double penalized_log_likelihood(double intercept, double slope, double ridge,
                                std::span<const double> x, std::span<const std::uint8_t> y);
std::array<double, 2> penalized_gradient(double intercept, double slope, double ridge,
                                         std::span<const double> x, std::span<const std::uint8_t> y);

/// Newton (IRLS) ascent on the penalized log-likelihood with step halving.
LogisticVisibilityModel fit_logistic(std::span<const double> x, std::span<const std::uint8_t> y,
                                     double ridge = kLogisticRidge);
/// visible ~ rt/tg. Throws Degenerate when every row carries the same label.
LogisticVisibilityModel fit_visibility_logistic(std::span<const ResultRow> rows);

/// (sprt/tg) = intercept + slope * (rt/tg), ordinary least squares.
struct RatioLinearModel {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  std::size_t rows = 0;

  double predict(double ratio) const noexcept { return intercept + slope * ratio; }
  /// Inverse prediction of the actual recovery time from an observed SPRT.
  double estimate_rt(double sprt, double tg) const;
};

RatioLinearModel fit_linear(std::span<const double> x, std::span<const double> y);
RatioLinearModel fit_ratio_linear(std::span<const ResultRow> rows);

/// Largest tg whose ratio expected_rt/tg still reaches target_p: floor(rt / x(p)), at least 1.
Timestep recommend_tg(const LogisticVisibilityModel& model, double expected_rt, double target_p);

struct AnalysisReport {
  std::size_t rows = 0;
  std::size_t failed = 0;
  std::size_t censored = 0;
  std::size_t visible = 0;
  VarianceShareReport spds;
  VarianceShareReport sprt;
  VarianceShareReport sprt_over_tg;
  LogisticVisibilityModel visibility;
  RatioLinearModel ratio;
};

AnalysisReport analyze(std::span<const ResultRow> rows);
nlohmann::json to_json(const AnalysisReport& report);
LogisticVisibilityModel visibility_from_report(const nlohmann::json& doc);

/// `ratio,probability` samples of the fitted curve.
std::string visibility_curve_csv(const LogisticVisibilityModel& model, double lo, double hi,
                                 std::size_t samples);
/// `rt_over_tg,sprt_over_tg` for every non-censored row.
std::string ratio_scatter_csv(std::span<const ResultRow> rows);

}  // namespace granusim

#include "granusim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "granusim/error.hpp"

namespace granusim {

Term Term::parse(std::string_view label) {
  Term term;
  term.label = std::string(label);
  std::size_t pos = 0;
  while (pos <= label.size()) {
    const std::size_t colon = label.find(':', pos);
    const std::string_view part =
        label.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos);
    if (part == "tg") {
      term.factors.push_back(Covariate::Tg);
    } else if (part == "rt") {
      term.factors.push_back(Covariate::Rt);
    } else if (part == "ds") {
      term.factors.push_back(Covariate::Ds);
    } else if (part == "rt/tg") {
      term.factors.push_back(Covariate::RtOverTg);
    } else {
      throw ConfigError("unknown model term '" + std::string(part) + "'");
    }
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  return term;
}

double Term::evaluate(const Factors& f) const {
  double v = 1.0;
  for (Covariate c : factors) {
    switch (c) {
      case Covariate::Tg: v *= static_cast<double>(f.tg); break;
      case Covariate::Rt: v *= static_cast<double>(f.rt); break;
      case Covariate::Ds: v *= static_cast<double>(f.ds); break;
      case Covariate::RtOverTg: v *= static_cast<double>(f.rt) / static_cast<double>(f.tg); break;
    }
  }
  return v;
}

std::vector<Term> default_terms() {
  std::vector<Term> terms;
  for (const char* label : {"tg", "rt", "ds", "tg:rt", "tg:ds", "rt:ds"}) terms.push_back(Term::parse(label));
  return terms;
}

std::string_view to_string(Response response) noexcept {
  switch (response) {
    case Response::Spds: return "spds";
    case Response::Sprt: return "sprt";
    case Response::SprtOverTg: return "sprt/tg";
  }
  return "unknown";
}

double VarianceShareReport::share(std::string_view term) const {
  for (const TermShare& t : terms) {
    if (t.term == term) return t.share;
  }
  throw PreconditionError("no term '" + std::string(term) + "' in report");
}

VarianceShareReport sequential_shares(std::span<const double> y,
                                      const std::vector<std::vector<double>>& columns,
                                      const std::vector<std::string>& labels, std::string response) {
  if (labels.size() != columns.size()) throw PreconditionError("one label per column required");
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto p = static_cast<Eigen::Index>(columns.size()) + 1;
  if (n < p) throw Collinear("fewer rows than model coefficients");

  Eigen::MatrixXd x(n, p);
  x.col(0).setOnes();
  for (Eigen::Index j = 1; j < p; ++j) {
    const auto& col = columns[static_cast<std::size_t>(j - 1)];
    if (static_cast<Eigen::Index>(col.size()) != n) throw PreconditionError("column length mismatch");
    x.col(j) = Eigen::Map<const Eigen::VectorXd>(col.data(), n);
  }
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);

  const double mean = yv.mean();
  const double total = (yv.array() - mean).square().sum();
  if (!(total > 0.0)) throw Degenerate("response '" + response + "' is constant");

  // Column order is preserved (no pivoting), so the squared entries of Q'y
  // are the sequential sums of squares of the terms in entry order.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double scale = std::max(x.col(j).norm(), 1.0);
    if (std::abs(r(j, j)) <= 1e-10 * scale) {
      throw Collinear(j == 0 ? std::string("intercept column vanishes")
                             : "term '" + labels[static_cast<std::size_t>(j - 1)] +
                                   "' is collinear with earlier terms");
    }
  }
  const Eigen::VectorXd effects = qr.householderQ().transpose() * yv;

  VarianceShareReport report;
  report.response = std::move(response);
  report.rows = y.size();
  report.total_ss = total;
  for (Eigen::Index j = 1; j < p; ++j) {
    const double ss = effects(j) * effects(j);
    report.terms.push_back({labels[static_cast<std::size_t>(j - 1)], ss, ss / total});
  }
  report.residual_ss = effects.tail(n - p).squaredNorm();
  report.residual_share = report.residual_ss / total;
  return report;
}

namespace {

double response_value(const ResultRow& row, Response response) {
  switch (response) {
    case Response::Spds: return row.spds;
    case Response::Sprt: return static_cast<double>(*row.sprt);
    case Response::SprtOverTg: return static_cast<double>(*row.sprt) / static_cast<double>(row.factors.tg);
  }
  return 0.0;
}

bool usable(const ResultRow& row, Response response) {
  if (!row.ok()) return false;
  return response == Response::Spds || row.sprt.has_value();
}

}  // namespace

VarianceShareReport variance_shares(std::span<const ResultRow> rows, Response response,
                                    std::span<const Term> terms) {
  std::vector<double> y;
  std::vector<std::vector<double>> columns(terms.size());
  std::vector<std::string> labels;
  for (const Term& t : terms) labels.push_back(t.label);
  for (const ResultRow& row : rows) {
    if (!usable(row, response)) continue;
    y.push_back(response_value(row, response));
    for (std::size_t j = 0; j < terms.size(); ++j) columns[j].push_back(terms[j].evaluate(row.factors));
  }
  return sequential_shares(y, columns, labels, std::string(to_string(response)));
}

namespace {

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_binary_data(std::span<const double> x, std::span<const std::uint8_t> y) {
  if (x.size() != y.size()) throw PreconditionError("x and y differ in length");
  if (x.empty()) throw Degenerate("no observations");
}

}  // namespace

double LogisticVisibilityModel::probability(double ratio) const noexcept {
  return sigmoid(intercept + slope * ratio);
}

double LogisticVisibilityModel::ratio_at(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw PreconditionError("probability must lie in (0, 1)");
  if (slope == 0.0) throw Degenerate("logistic slope is zero");
  return (std::log(p / (1.0 - p)) - intercept) / slope;
}

double penalized_log_likelihood(double intercept, double slope, double ridge,
                                std::span<const double> x, std::span<const std::uint8_t> y) {
  check_binary_data(x, y);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double eta = intercept + slope * x[i];
    ll -= y[i] ? softplus(-eta) : softplus(eta);
  }
  return ll - 0.5 * ridge * slope * slope;
}

std::array<double, 2> penalized_gradient(double intercept, double slope, double ridge,
                                         std::span<const double> x, std::span<const std::uint8_t> y) {
  check_binary_data(x, y);
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] ? 1.0 : 0.0) - sigmoid(intercept + slope * x[i]);
    g[0] += r;
    g[1] += r * x[i];
  }
  g[1] -= ridge * slope;
  return g;
}

LogisticVisibilityModel fit_logistic(std::span<const double> x, std::span<const std::uint8_t> y,
                                     double ridge) {
  check_binary_data(x, y);
  if (!(ridge >= 0.0)) throw PreconditionError("ridge must be nonnegative");
  const auto positives = std::count_if(y.begin(), y.end(), [](std::uint8_t v) { return v != 0; });
  if (positives == 0 || positives == static_cast<std::ptrdiff_t>(y.size()))
    throw Degenerate("all observations share one label");

  LogisticVisibilityModel model;
  model.ridge = ridge;
  model.rows = x.size();
  double a = 0.0;
  double b = 0.0;
  double objective = penalized_log_likelihood(a, b, ridge, x, y);
  constexpr int kMaxIterations = 2000;
  constexpr double kTolerance = 1e-11;

  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const auto g = penalized_gradient(a, b, ridge, x, y);
    if (std::hypot(g[0], g[1]) < kTolerance) break;

    double h00 = 0.0, h01 = 0.0, h11 = ridge;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = sigmoid(a + b * x[i]);
      const double w = p * (1.0 - p);
      h00 += w;
      h01 += w * x[i];
      h11 += w * x[i] * x[i];
    }
    const double det = h00 * h11 - h01 * h01;
    double da, db;
    if (det > 0.0 && std::isfinite(det)) {
      da = (h11 * g[0] - h01 * g[1]) / det;
      db = (h00 * g[1] - h01 * g[0]) / det;
    } else {
      da = g[0];
      db = g[1];
    }

    // Halve the Newton step until the objective does not decrease. Within
    // rounding of the optimum the objective is flat, so a smaller gradient decides.
    const double gnorm = std::hypot(g[0], g[1]);
    const double flat = 1e-13 * (1.0 + std::abs(objective));
    double step = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double candidate = penalized_log_likelihood(na, nb, ridge, x, y);
      bool accept = candidate >= objective;
      if (!accept && candidate >= objective - flat) {
        const auto ng = penalized_gradient(na, nb, ridge, x, y);
        accept = std::hypot(ng[0], ng[1]) < gnorm;
      }
      if (accept) {
        moved = na != a || nb != b;
        a = na;
        b = nb;
        objective = candidate;
        break;
      }
    }
    if (!moved) break;
  }
  model.intercept = a;
  model.slope = b;
  model.iterations = it;
  return model;
}

LogisticVisibilityModel fit_visibility_logistic(std::span<const ResultRow> rows) {
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (const ResultRow& row : rows) {
    if (!row.ok()) continue;
    x.push_back(static_cast<double>(row.factors.rt) / static_cast<double>(row.factors.tg));
    y.push_back(row.visible ? 1 : 0);
  }
  return fit_logistic(x, y);
}

double RatioLinearModel::estimate_rt(double sprt, double tg) const {
  if (slope == 0.0) throw Degenerate("ratio model slope is zero");
  return (sprt / tg - intercept) / slope * tg;
}

RatioLinearModel fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("x and y differ in length");
  if (x.size() < 2) throw Degenerate("need at least two observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Degenerate("all predictor values are equal");

  RatioLinearModel model;
  model.rows = x.size();
  model.slope = sxy / sxx;
  model.intercept = my - model.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - model.predict(x[i]);
    sse += e * e;
  }
  model.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return model;
}

RatioLinearModel fit_ratio_linear(std::span<const ResultRow> rows) {
  std::vector<double> x, y;
  for (const ResultRow& row : rows) {
    if (!usable(row, Response::Sprt)) continue;
    const auto tg = static_cast<double>(row.factors.tg);
    x.push_back(static_cast<double>(row.factors.rt) / tg);
    y.push_back(static_cast<double>(*row.sprt) / tg);
  }
  return fit_linear(x, y);
}

Timestep recommend_tg(const LogisticVisibilityModel& model, double expected_rt, double target_p) {
  if (!(target_p > 0.0 && target_p < 1.0)) throw PreconditionError("target likelihood must lie in (0, 1)");
  if (!(expected_rt > 0.0)) throw PreconditionError("expected recovery time must be positive");
  if (!(model.slope > 0.0)) throw Degenerate("visibility model slope must be positive");
  const double ratio = model.ratio_at(target_p);
  if (!(ratio > 0.0))
    throw Degenerate("target likelihood is reached at a non-positive ratio; tg is unconstrained");
  const double tg = std::floor(expected_rt / ratio);
  if (!(tg >= 1.0)) return 1;
  if (tg > static_cast<double>(std::numeric_limits<Timestep>::max() / 2))
    return std::numeric_limits<Timestep>::max() / 2;
  return static_cast<Timestep>(tg);
}

AnalysisReport analyze(std::span<const ResultRow> rows) {
  AnalysisReport report;
  for (const ResultRow& row : rows) {
    ++report.rows;
    if (!row.ok()) {
      ++report.failed;
      continue;
    }
    if (row.censored()) ++report.censored;
    if (row.visible) ++report.visible;
  }
  const std::vector<Term> terms = default_terms();
  report.spds = variance_shares(rows, Response::Spds, terms);
  report.sprt = variance_shares(rows, Response::Sprt, terms);
  std::vector<Term> ratio_terms;
  for (const char* label : {"rt/tg", "tg", "rt", "ds"}) ratio_terms.push_back(Term::parse(label));
  report.sprt_over_tg = variance_shares(rows, Response::SprtOverTg, ratio_terms);
  report.visibility = fit_visibility_logistic(rows);
  report.ratio = fit_ratio_linear(rows);
  return report;
}

namespace {

nlohmann::json to_json(const VarianceShareReport& r) {
  nlohmann::json terms = nlohmann::json::array();
  for (const TermShare& t : r.terms)
    terms.push_back({{"term", t.term}, {"sum_of_squares", t.sum_of_squares}, {"share", t.share}});
  return {
      {"response", r.response},
      {"rows", r.rows},
      {"total_ss", r.total_ss},
      {"terms", std::move(terms)},
      {"residual_ss", r.residual_ss},
      {"residual_share", r.residual_share},
      {"explained_share", r.explained_share()},
  };
}

}  // namespace

nlohmann::json to_json(const AnalysisReport& report) {
  nlohmann::json visibility = {
      {"intercept", report.visibility.intercept},
      {"slope", report.visibility.slope},
      {"ridge", report.visibility.ridge},
      {"iterations", report.visibility.iterations},
      {"rows", report.visibility.rows},
  };
  if (report.visibility.slope > 0.0) {
    const double x50 = report.visibility.ratio_at(0.5);
    visibility["ratio_at_p50"] = x50;
    visibility["ratio_at_p95"] = report.visibility.ratio_at(0.95);
    if (x50 > 0.0) visibility["max_tg_per_rt_at_p50"] = 1.0 / x50;
  }
  return {
      {"rows", report.rows},
      {"failed_rows", report.failed},
      {"censored_rows", report.censored},
      {"visible_rows", report.visible},
      {"variance_shares",
       {{"spds", to_json(report.spds)},
        {"sprt", to_json(report.sprt)},
        {"sprt_over_tg", to_json(report.sprt_over_tg)}}},
      {"visibility_logistic", std::move(visibility)},
      {"ratio_linear",
       {{"intercept", report.ratio.intercept},
        {"slope", report.ratio.slope},
        {"r_squared", report.ratio.r_squared},
        {"rows", report.ratio.rows}}},
  };
}

LogisticVisibilityModel visibility_from_report(const nlohmann::json& doc) {
  try {
    const auto& v = doc.at("visibility_logistic");
    LogisticVisibilityModel m;
    m.intercept = v.at("intercept").get<double>();
    m.slope = v.at("slope").get<double>();
    m.ridge = v.value("ridge", kLogisticRidge);
    m.iterations = v.value("iterations", 0);
    m.rows = v.value("rows", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("report lacks a visibility model: ") + ex.what());
  }
}

std::string visibility_curve_csv(const LogisticVisibilityModel& model, double lo, double hi,
                                 std::size_t samples) {
  if (samples < 2 || !(hi > lo)) throw PreconditionError("curve needs hi > lo and >= 2 samples");
  std::string out = "ratio,probability\n";
  char buf[64];
  for (std::size_t k = 0; k < samples; ++k) {
    const double r = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(samples - 1);
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", r, model.probability(r));
    out += buf;
  }
  return out;
}

std::string ratio_scatter_csv(std::span<const ResultRow> rows) {
  std::string out = "rt_over_tg,sprt_over_tg\n";
  char buf[64];
  for (const ResultRow& row : rows) {
    if (!usable(row, Response::Sprt)) continue;
    const auto tg = static_cast<double>(row.factors.tg);
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", static_cast<double>(row.factors.rt) / tg,
                  static_cast<double>(*row.sprt) / tg);
    out += buf;
  }
  return out;
}

}  // namespace granusim

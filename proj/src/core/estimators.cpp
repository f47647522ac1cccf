#include "estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "error.hpp"

namespace svy {

std::string_view to_string(EstimatorKind k) noexcept {
  switch (k) {
    case EstimatorKind::Ht: return "HT";
    case EstimatorKind::Hajek: return "Hajek";
    case EstimatorKind::Ratio: return "Ratio";
    case EstimatorKind::Product: return "Product";
    case EstimatorKind::Rhc: return "RHC";
    case EstimatorKind::Greg: return "GREG";
    case EstimatorKind::Peml: return "PEML";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "HT") return EstimatorKind::Ht;
  if (up == "HAJEK" || up == "H") return EstimatorKind::Hajek;
  if (up == "RATIO" || up == "RA") return EstimatorKind::Ratio;
  if (up == "PRODUCT" || up == "PR") return EstimatorKind::Product;
  if (up == "RHC" || up == "RHCEST") return EstimatorKind::Rhc;
  if (up == "GREG") return EstimatorKind::Greg;
  if (up == "PEML") return EstimatorKind::Peml;
  return std::nullopt;
}

bool is_valid_combination(EstimatorKind kind, DesignKind design) noexcept {
  if (kind == EstimatorKind::Greg || kind == EstimatorKind::Peml) return true;
  if (design == DesignKind::Rhc) return kind == EstimatorKind::Rhc;
  return kind != EstimatorKind::Rhc;
}

void require_valid_combination(EstimatorKind kind, DesignKind design) {
  if (!is_valid_combination(kind, design))
    fail(ErrorCode::Combination, std::string(to_string(kind)) +
                                     " estimator is not defined under " +
                                     std::string(to_string(design)) + " sampling");
}

std::vector<double> sample_x(const SampleDraw& sample, const Population& pop) {
  std::vector<double> xs(sample.n());
  for (std::size_t k = 0; k < sample.n(); ++k) xs[k] = pop.x()[sample.indices[k]];
  return xs;
}

std::vector<double> design_weights(const SampleDraw& sample, const Population& pop) {
  const auto N = static_cast<double>(pop.size());
  std::vector<double> d(sample.n());
  if (is_pi_design(sample.design)) {
    if (sample.pi.size() != sample.n())
      fail(ErrorCode::Parameter, "sample carries no inclusion probabilities");
    for (std::size_t k = 0; k < sample.n(); ++k) d[k] = 1.0 / (N * sample.pi[k]);
  } else {
    if (sample.g_totals.size() != sample.n())
      fail(ErrorCode::Parameter, "RHC sample carries no group totals");
    for (std::size_t k = 0; k < sample.n(); ++k)
      d[k] = sample.g_totals[k] / (N * pop.x()[sample.indices[k]]);
  }
  return d;
}

double peml_objective(std::span<const double> d, std::span<const double> c) {
  const double total = std::accumulate(d.begin(), d.end(), 0.0);
  double obj = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) obj += d[i] / total * std::log(c[i]);
  return obj;
}

CalibratedWeights peml_weights(std::span<const double> d,
                               std::span<const double> x_sample, double x_bar) {
  const std::size_t n = d.size();
  if (n < 2 || x_sample.size() != n)
    fail(ErrorCode::Parameter, "PEML needs n >= 2 weights aligned with x");
  const double d_total = std::accumulate(d.begin(), d.end(), 0.0);
  if (!(d_total > 0.0)) fail(ErrorCode::Parameter, "design weights must be positive");

  std::vector<double> dt(n), u(n);
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dt[i] = d[i] / d_total;
    u[i] = x_sample[i] - x_bar;
    u_min = std::min(u_min, u[i]);
    u_max = std::max(u_max, u[i]);
    scale += dt[i] * std::fabs(u[i]);
  }

  CalibratedWeights out;
  if (u_min == 0.0 && u_max == 0.0) {
    out.c = dt;
    return out;
  }
  if (!(u_min < 0.0 && u_max > 0.0))
    fail(ErrorCode::Infeasible,
         "population mean of x lies outside the open hull of the sampled x");

  auto f_and_df = [&](double lambda, double& f, double& df) {
    f = 0.0;
    df = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = 1.0 + lambda * u[i];
      const double t = dt[i] * u[i] / denom;
      f += t;
      df -= t * u[i] / denom;
    }
  };

  // Open interval keeping every 1 + lambda u_i > 0.
  double lo = -1.0 / u_max;
  double hi = -1.0 / u_min;
  const double tol = kPemlTolerance * scale;
  double lambda = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < kPemlMaxIterations; ++it) {
    double f = 0.0, df = 0.0;
    f_and_df(lambda, f, df);
    if (std::fabs(f) <= tol) {
      converged = true;
      break;
    }
    // f is decreasing: positive f means the root lies to the right.
    if (f > 0.0) lo = lambda;
    else hi = lambda;
    double next = lambda - f / df;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == lambda || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(std::fabs(lo), std::fabs(hi))) {
      lambda = next;
      f_and_df(lambda, f, df);
      converged = std::fabs(f) <= 1e3 * tol;
      break;
    }
    lambda = next;
  }
  if (!converged)
    fail(ErrorCode::Convergence, "PEML dual root did not converge in " +
                                     std::to_string(kPemlMaxIterations) +
                                     " iterations");

  out.c.resize(n);
  double c_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.c[i] = dt[i] / (1.0 + lambda * u[i]);
    c_total += out.c[i];
  }
  for (auto& ci : out.c) ci /= c_total;
  out.lambda = lambda;
  out.iterations = it;
  return out;
}

namespace {

std::vector<double> weighted_column_sums(const Matrix& h,
                                         const std::vector<double>& w) {
  std::vector<double> acc(h.cols(), 0.0);
  for (std::size_t k = 0; k < h.rows(); ++k)
    for (std::size_t j = 0; j < h.cols(); ++j) acc[j] += w[k] * h(k, j);
  return acc;
}

std::vector<double> greg(const std::vector<double>& d, const std::vector<double>& xs,
                         double x_bar, const Matrix& h) {
  const double d_total = std::accumulate(d.begin(), d.end(), 0.0);
  double x_star = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) x_star += d[k] * xs[k];
  x_star /= d_total;
  double sxx = 0.0, sx2 = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    sxx += d[k] * (xs[k] - x_star) * (xs[k] - x_star);
    sx2 += d[k] * xs[k] * xs[k];
  }
  if (!(sxx > 1e-14 * sx2))
    fail(ErrorCode::Degenerate, "GREG: sampled x values have zero weighted variance");

  std::vector<double> out(h.cols());
  for (std::size_t j = 0; j < h.cols(); ++j) {
    double y_star = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) y_star += d[k] * h(k, j);
    y_star /= d_total;
    double sxy = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
      sxy += d[k] * (h(k, j) - y_star) * (xs[k] - x_star);
    out[j] = y_star + (sxy / sxx) * (x_bar - x_star);
  }
  return out;
}

}  // namespace

std::vector<double> estimate_mean(EstimatorKind kind, const SampleDraw& sample,
                                  const Population& pop, const Matrix& h) {
  require_valid_combination(kind, sample.design);
  if (h.rows() != sample.n())
    fail(ErrorCode::Parameter, "h must have one row per sampled unit");
  const double x_bar = pop.x_bar();
  const auto xs = sample_x(sample, pop);
  const auto d = design_weights(sample, pop);

  switch (kind) {
    case EstimatorKind::Ht:
    case EstimatorKind::Rhc:
      return weighted_column_sums(h, d);
    case EstimatorKind::Hajek: {
      auto est = weighted_column_sums(h, d);
      const double total = std::accumulate(d.begin(), d.end(), 0.0);
      for (auto& v : est) v /= total;
      return est;
    }
    case EstimatorKind::Ratio: {
      auto est = weighted_column_sums(h, d);
      double x_ht = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) x_ht += d[k] * xs[k];
      for (auto& v : est) v = v / x_ht * x_bar;
      return est;
    }
    case EstimatorKind::Product: {
      auto est = weighted_column_sums(h, d);
      double x_ht = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) x_ht += d[k] * xs[k];
      for (auto& v : est) v = v * x_ht / x_bar;
      return est;
    }
    case EstimatorKind::Greg:
      return greg(d, xs, x_bar, h);
    case EstimatorKind::Peml: {
      const auto w = peml_weights(d, xs, x_bar);
      return weighted_column_sums(h, w.c);
    }
  }
  fail(ErrorCode::Parameter, "unknown estimator");
}

}  // namespace svy

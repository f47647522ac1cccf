#include "inference.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "asymptotics.hpp"
#include "error.hpp"

namespace svy {

namespace {

double dot(const std::vector<double>& a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

// Gradient point: the HT/RHC estimate, except Correlation which needs a
// self-normalized mean to stay defined.
std::vector<double> gradient_at(const Functional& f, const std::vector<double>& linear,
                                const std::vector<double>& normalized) {
  return g_grad(f, f.kind == FunctionalKind::Correlation ? normalized : linear);
}

}  // namespace

bool has_variance_estimator(EstimatorKind kind, DesignKind design) noexcept {
  switch (kind) {
    case EstimatorKind::Greg:
    case EstimatorKind::Peml: return true;
    case EstimatorKind::Ht:
    case EstimatorKind::Hajek: return design != DesignKind::Rhc;
    case EstimatorKind::Rhc: return design == DesignKind::Rhc;
    default: return false;
  }
}

double variance_est_pi(const SampleDraw& sample, const Population& pop,
                       const Functional& f, EstimatorKind kind) {
  if (!is_pi_design(sample.design))
    fail(ErrorCode::Combination, "variance_est_pi needs an inclusion-probability design");
  if (!has_variance_estimator(kind, sample.design))
    fail(ErrorCode::Combination, "no variance estimator for " +
                                     std::string(to_string(kind)) + " under " +
                                     std::string(to_string(sample.design)));
  const std::size_t n = sample.n();
  const auto N = static_cast<double>(pop.size());
  const Matrix h = sample_h(f, pop, sample);
  const std::size_t p = h.cols();
  const auto xs = sample_x(sample, pop);
  const auto& pi = sample.pi;

  std::vector<double> h_ht(p, 0.0), h_num(p, 0.0);
  double x_ht = 0.0, x2_ht = 0.0, inv_pi_total = 0.0;
  std::vector<double> xh_ht(p, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double d = 1.0 / (N * pi[k]);
    x_ht += d * xs[k];
    x2_ht += d * xs[k] * xs[k];
    inv_pi_total += 1.0 / pi[k];
    for (std::size_t j = 0; j < p; ++j) {
      h_ht[j] += d * h(k, j);
      xh_ht[j] += d * xs[k] * h(k, j);
      h_num[j] += h(k, j) / pi[k];
    }
  }
  std::vector<double> h_hajek(p);
  for (std::size_t j = 0; j < p; ++j) h_hajek[j] = h_num[j] / inv_pi_total;

  Matrix v(n, p);
  std::vector<double> slope(p, 0.0);
  if (kind == EstimatorKind::Greg || kind == EstimatorKind::Peml) {
    const double s2_x = x2_ht - x_ht * x_ht;
    if (!(s2_x > 0.0)) fail(ErrorCode::Degenerate, "estimated S_x^2 is not positive");
    for (std::size_t j = 0; j < p; ++j) slope[j] = (xh_ht[j] - x_ht * h_ht[j]) / s2_x;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < p; ++j) {
      switch (kind) {
        case EstimatorKind::Ht: v(k, j) = h(k, j); break;
        case EstimatorKind::Hajek: v(k, j) = h(k, j) - h_ht[j]; break;
        default: v(k, j) = h(k, j) - h_ht[j] - slope[j] * (xs[k] - x_ht); break;
      }
    }
  }

  double denom = 0.0;
  for (std::size_t k = 0; k < n; ++k) denom += 1.0 - pi[k];
  if (!(denom > 0.0)) fail(ErrorCode::Degenerate, "sum of (1 - pi_i) over the sample is 0");
  std::vector<double> t(p, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < p; ++j) t[j] += v(k, j) * (1.0 / pi[k] - 1.0);
  for (auto& tj : t) tj /= denom;

  const auto grad = gradient_at(f, h_ht, h_hajek);
  double acc = 0.0;
  std::vector<double> row(p);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < p; ++j) row[j] = v(k, j) - t[j] * pi[k];
    const double a = dot(grad, row);
    acc += a * a * (1.0 / pi[k] - 1.0) / pi[k];
  }
  return static_cast<double>(n) / (N * N) * acc;
}

double variance_est_rhc(const SampleDraw& sample, const Population& pop,
                        const Functional& f, EstimatorKind kind) {
  if (sample.design != DesignKind::Rhc)
    fail(ErrorCode::Combination, "variance_est_rhc needs an RHC sample");
  if (!has_variance_estimator(kind, sample.design))
    fail(ErrorCode::Combination, "no RHC variance estimator for " +
                                     std::string(to_string(kind)));
  const std::size_t n = sample.n();
  const auto N = static_cast<double>(pop.size());
  const double x_bar = pop.x_bar();
  const Matrix h = sample_h(f, pop, sample);
  const std::size_t p = h.cols();
  const auto xs = sample_x(sample, pop);
  const auto& G = sample.g_totals;

  std::vector<double> h_rhc(p, 0.0), xh_rhc(p, 0.0);
  double x2_rhc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = G[k] / (N * xs[k]);
    x2_rhc += xs[k] * G[k] / N;
    for (std::size_t j = 0; j < p; ++j) {
      h_rhc[j] += d * h(k, j);
      xh_rhc[j] += h(k, j) * G[k] / N;
    }
  }

  Matrix v(n, p);
  if (kind == EstimatorKind::Rhc) {
    v = h;
  } else {
    const double s2_x = x2_rhc - x_bar * x_bar;
    if (!(s2_x > 0.0)) fail(ErrorCode::Degenerate, "estimated S_x^2 is not positive");
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < p; ++j) {
        const double slope = (xh_rhc[j] - x_bar * h_rhc[j]) / s2_x;
        v(k, j) = h(k, j) - h_rhc[j] - slope * (xs[k] - x_bar);
      }
  }
  std::vector<double> v_bar(p, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < p; ++j) v_bar[j] += v(k, j) * G[k] / (N * xs[k]);

  std::vector<double> grad;
  if (f.kind == FunctionalKind::Correlation)
    grad = g_grad(f, estimate_mean(EstimatorKind::Peml, sample, pop, h));
  else
    grad = g_grad(f, h_rhc);

  double acc = 0.0;
  std::vector<double> row(p);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < p; ++j) row[j] = v(k, j) - xs[k] * v_bar[j] / x_bar;
    const double a = dot(grad, row);
    acc += a * a * G[k] / (xs[k] * xs[k]);
  }
  const double gamma = gamma_coeff(pop.size(), n);
  return static_cast<double>(n) * gamma * x_bar / N * acc;
}

double variance_est(const SampleDraw& sample, const Population& pop,
                    const Functional& f, EstimatorKind kind) {
  return is_pi_design(sample.design) ? variance_est_pi(sample, pop, f, kind)
                                     : variance_est_rhc(sample, pop, f, kind);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::Parameter, "quantile level must be in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

ConfidenceInterval confidence_interval(double point, double var_est, std::size_t n,
                                       double level) {
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorCode::Parameter, "confidence level must be in (0, 1)");
  if (!(var_est >= 0.0)) fail(ErrorCode::Parameter, "variance estimate must be >= 0");
  if (n == 0) fail(ErrorCode::Parameter, "n must be positive");
  const double z = normal_quantile(0.5 * (1.0 + level));
  return {point, z * std::sqrt(var_est / static_cast<double>(n)), level};
}

double jackknife_bc(const SampleDraw& sample, const Population& pop,
                    const Functional& f, EstimatorKind kind) {
  const std::size_t n = sample.n();
  if (n < 3) fail(ErrorCode::Parameter, "jackknife needs n >= 3");
  const double full = plug_in(f, kind, sample, pop);
  double loo_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    try {
      loo_sum += plug_in(f, kind, sample.without(k), pop);
    } catch (const Error& e) {
      fail(ErrorCode::JackknifeFailure,
           "leave-one-out estimate without unit " +
               std::to_string(sample.indices[k] + 1) + " failed: " + e.what());
    }
  }
  const auto nn = static_cast<double>(n);
  return nn * full - (nn - 1.0) * loo_sum / nn;
}

}  // namespace svy

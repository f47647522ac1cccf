#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace svy {

double gamma_coeff(std::size_t N, std::size_t n) {
  const auto sizes = rhc_group_sizes(N, n);
  double acc = 0.0;
  for (auto s : sizes) acc += static_cast<double>(s) * static_cast<double>(s - 1);
  return acc / (static_cast<double>(N) * static_cast<double>(N - 1));
}

double n_gamma_limit(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    fail(ErrorCode::Parameter, "lambda must lie in (0, 1)");
  const double t = lambda * std::floor(1.0 / lambda);
  return t * (2.0 - t - lambda);
}

AsymptoticContext make_context(const std::vector<double>& x,
                               const std::vector<double>& w, std::size_t n) {
  if (x.size() != w.size() || x.size() < 2)
    fail(ErrorCode::Parameter, "x and W must be aligned with N >= 2");
  AsymptoticContext ctx;
  ctx.N = x.size();
  ctx.n = n;
  const auto N = static_cast<double>(ctx.N);
  ctx.lambda = static_cast<double>(n) / N;
  ctx.x = x;
  ctx.w = w;
  double sx = 0, sw = 0, sxx = 0, sww = 0, sxw = 0;
  for (std::size_t i = 0; i < ctx.N; ++i) {
    sx += x[i];
    sw += w[i];
    sxx += x[i] * x[i];
    sww += w[i] * w[i];
    sxw += x[i] * w[i];
  }
  ctx.x_bar = sx / N;
  ctx.w_bar = sw / N;
  ctx.s2_x = sxx / N - ctx.x_bar * ctx.x_bar;
  ctx.s2_w = sww / N - ctx.w_bar * ctx.w_bar;
  ctx.s_xw = sxw / N - ctx.x_bar * ctx.w_bar;
  ctx.phi = ctx.x_bar - ctx.lambda * (sxx / N) / ctx.x_bar;
  ctx.gamma = gamma_coeff(ctx.N, n);
  return ctx;
}

AsymptoticContext make_context(const Population& pop, const Functional& f,
                               std::size_t n) {
  const auto hbar = population_h_mean(f, pop);
  const auto grad = g_grad(f, hbar);
  const Matrix h = h_transform(f, select_study(f, pop));
  std::vector<double> w(pop.size(), 0.0);
  for (std::size_t i = 0; i < pop.size(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) w[i] += grad[j] * h(i, j);
  return make_context(pop.x(), w, n);
}

double delta_sq(int class_id, const AsymptoticContext& c) {
  const auto N = static_cast<double>(c.N);
  const double one_minus = 1.0 - c.lambda;
  const double slope = c.s2_x > 0.0 ? c.s_xw / c.s2_x : 0.0;
  auto residual = [&](std::size_t i) {
    return c.w[i] - c.w_bar - slope * (c.x[i] - c.x_bar);
  };
  auto pips_weight = [&](std::size_t i) { return c.x_bar / c.x[i] - c.lambda; };
  auto require_phi = [&] {
    if (c.phi == 0.0) fail(ErrorCode::Singularity, "phi = 0: class " +
                                                       std::to_string(class_id) +
                                                       " is singular");
  };
  auto require_sx = [&] {
    if (!(c.s2_x > 0.0)) fail(ErrorCode::Singularity, "S_x^2 = 0");
  };

  double acc = 0.0;
  switch (class_id) {
    case 1:
      require_sx();
      return one_minus * (c.s2_w - c.s_xw * c.s_xw / c.s2_x);
    case 2:
      return one_minus * c.s2_w;
    case 3: {
      const double r = c.w_bar / c.x_bar;
      return one_minus * (c.s2_w - 2.0 * r * c.s_xw + r * r * c.s2_x);
    }
    case 4: {
      const double r = c.w_bar / c.x_bar;
      return one_minus * (c.s2_w + 2.0 * r * c.s_xw + r * r * c.s2_x);
    }
    case 5:
      require_sx();
      for (std::size_t i = 0; i < c.N; ++i) {
        const double e = residual(i);
        acc += e * e * pips_weight(i);
      }
      return acc / N;
    case 6: {
      require_phi();
      double swx = 0.0;
      for (std::size_t i = 0; i < c.N; ++i) swx += c.w[i] * c.x[i];
      const double k = (c.lambda * swx / N - c.w_bar * c.x_bar) / (c.phi * c.x_bar);
      for (std::size_t i = 0; i < c.N; ++i) {
        const double e = c.w[i] + k * c.x[i];
        acc += e * e * pips_weight(i);
      }
      return acc / N;
    }
    case 7: {
      require_phi();
      const double k = c.lambda * c.s_xw / (c.phi * c.x_bar);
      for (std::size_t i = 0; i < c.N; ++i) {
        const double e = c.w[i] - c.w_bar + k * c.x[i];
        acc += e * e * pips_weight(i);
      }
      return acc / N;
    }
    case 8:
      require_sx();
      for (std::size_t i = 0; i < c.N; ++i) {
        const double e = residual(i);
        acc += e * e / c.x[i];
      }
      return static_cast<double>(c.n) * c.gamma * (c.x_bar / N) * acc;
    case 9:
      for (std::size_t i = 0; i < c.N; ++i) acc += c.w[i] * c.w[i] / c.x[i];
      return static_cast<double>(c.n) * c.gamma *
             ((c.x_bar / N) * acc - c.w_bar * c.w_bar);
    default:
      fail(ErrorCode::Parameter, "class id must be in 1..9");
  }
}

int equivalence_class(EstimatorKind kind, DesignKind design, bool lambda_zero) {
  require_valid_combination(kind, design);
  const bool calibrated = kind == EstimatorKind::Greg || kind == EstimatorKind::Peml;
  switch (design) {
    case DesignKind::Srswor:
    case DesignKind::Lms:
      if (calibrated) return 1;
      if (kind == EstimatorKind::Ht || kind == EstimatorKind::Hajek) return 2;
      return kind == EstimatorKind::Ratio ? 3 : 4;
    case DesignKind::RaoSampford:
      if (calibrated) return 5;
      return kind == EstimatorKind::Hajek ? 7 : 6;
    case DesignKind::Rhc:
      if (calibrated) return lambda_zero ? 5 : 8;
      return lambda_zero ? 6 : 9;
  }
  fail(ErrorCode::Parameter, "unknown design");
}

MomentSummary moments_of(const std::vector<double>& x) {
  MomentSummary m;
  for (double v : x) {
    m.mu_m1 += 1.0 / v;
    m.mu1 += v;
    m.mu2 += v * v;
    m.mu3 += v * v * v;
  }
  const auto N = static_cast<double>(x.size());
  m.mu_m1 /= N;
  m.mu1 /= N;
  m.mu2 /= N;
  m.mu3 /= N;
  return m;
}

bool check_c6(const MomentSummary& m) {
  if (!(m.mu1 > 0.0) || !(m.mu_m1 > 0.0))
    fail(ErrorCode::Parameter, "moment summary needs mu1 > 0 and mu_-1 > 0");
  const double excess = m.mu1 * m.mu_m1 - 1.0;
  if (!(excess > 1e-12))
    fail(ErrorCode::UndefinedParameter, "mu1 * mu_-1 = 1: moment predicate undefined");
  return m.xi() > 2.0 * std::max(m.mu1, m.mu_m1 / excess);
}

}  // namespace svy

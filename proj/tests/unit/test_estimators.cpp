#include <algorithm>
#include <cmath>
#include <numeric>

#include "designs.hpp"
#include "doctest.h"
#include "estimators.hpp"
#include "functionals.hpp"
#include "support.hpp"

using namespace svy;
using testutil::code_of;
using testutil::pop1;

namespace {

SampleDraw pi_sample(DesignKind d, std::vector<std::size_t> idx, std::vector<double> pi) {
  SampleDraw s;
  s.design = d;
  s.indices = std::move(idx);
  s.pi = std::move(pi);
  return s;
}

Matrix column(const std::vector<double>& v) { return Matrix(v.size(), 1, v); }

}  // namespace

TEST_CASE("design weights") {
  const auto pop10 = pop1(std::vector<double>(10, 1.0), std::vector<double>(10, 0.0));
  const auto srs = pi_sample(DesignKind::Srswor, {0, 2, 4, 6, 8}, std::vector<double>(5, 0.5));
  for (double d : design_weights(srs, pop10)) CHECK(d == doctest::Approx(0.2));

  const auto pop4 = pop1({1, 2, 3, 4}, {0, 0, 0, 0});
  const auto rs = pi_sample(DesignKind::RaoSampford, {1, 3}, {0.4, 0.8});
  const auto d = design_weights(rs, pop4);
  CHECK(d[0] == doctest::Approx(0.625));
  CHECK(d[1] == doctest::Approx(0.3125));

  SampleDraw rhc;
  rhc.design = DesignKind::Rhc;
  rhc.indices = {1, 4};
  rhc.g_totals = {7.0, 8.0};
  const auto pop5 = pop1({1, 2, 3, 4, 5}, {0, 0, 0, 0, 0});
  CHECK(design_weights(rhc, pop5)[0] == doctest::Approx(0.7));
}

TEST_CASE("closed forms on a hand example") {
  // x = (1,2,3,4), Xbar = 2.5, pi = (0.2,0.4,0.6,0.8), s = {3,4}
  const auto pop = pop1({1, 2, 3, 4}, {10, 20, 35, 36});
  const auto s = pi_sample(DesignKind::Lms, {2, 3}, {0.6, 0.8});
  const auto h1 = column({1.0, 1.0});
  CHECK(estimate_mean(EstimatorKind::Ht, s, pop, h1)[0] ==
        doctest::Approx((1 / 0.6 + 1 / 0.8) / 4).epsilon(1e-14));
  CHECK(estimate_mean(EstimatorKind::Hajek, s, pop, h1)[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto h = column({35.0, 36.0});
  const double ht = (35 / 0.6 + 36 / 0.8) / 4;
  const double x_ht = (3 / 0.6 + 4 / 0.8) / 4;
  CHECK(estimate_mean(EstimatorKind::Ht, s, pop, h)[0] == doctest::Approx(ht).epsilon(1e-14));
  CHECK(estimate_mean(EstimatorKind::Ratio, s, pop, h)[0] ==
        doctest::Approx(ht / x_ht * 2.5).epsilon(1e-14));
  CHECK(estimate_mean(EstimatorKind::Product, s, pop, h)[0] ==
        doctest::Approx(ht * x_ht / 2.5).epsilon(1e-14));
  CHECK(estimate_mean(EstimatorKind::Hajek, s, pop, h)[0] ==
        doctest::Approx((35 / 0.6 + 36 / 0.8) / (1 / 0.6 + 1 / 0.8)).epsilon(1e-14));
}

TEST_CASE("GREG matches weighted least squares") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 400, 21);
  Rng rng(3);
  const auto s = draw(DesignKind::Lms, pop, 30, rng);
  const auto d = design_weights(s, pop);
  const auto xs = sample_x(s, pop);
  std::vector<double> ys;
  for (auto i : s.indices) ys.push_back(pop.y()(i, 0));
  // oracle: closed-form weighted simple regression, evaluated independently
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    sw += d[k];
    swx += d[k] * xs[k];
    swy += d[k] * ys[k];
    swxx += d[k] * xs[k] * xs[k];
    swxy += d[k] * xs[k] * ys[k];
  }
  const double b = (sw * swxy - swx * swy) / (sw * swxx - swx * swx);
  const double a = (swy - b * swx) / sw;
  const double want = a + b * pop.x_bar();
  CHECK(estimate_mean(EstimatorKind::Greg, s, pop, column(ys))[0] ==
        doctest::Approx(want).epsilon(1e-11));
}

TEST_CASE("SRSWOR: HT equals Hajek equals the sample mean") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 300, 9);
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = draw(DesignKind::Srswor, pop, 25, rng);
    const auto h = sample_h(Functional::mean(), pop, s);
    double mean = 0;
    for (std::size_t k = 0; k < s.n(); ++k) mean += h(k, 0);
    mean /= s.n();
    const double ht = estimate_mean(EstimatorKind::Ht, s, pop, h)[0];
    const double hj = estimate_mean(EstimatorKind::Hajek, s, pop, h)[0];
    CHECK(std::abs(ht - hj) <= 1e-14 * std::abs(ht));
    CHECK(ht == doctest::Approx(mean).epsilon(1e-13));
  }
}

TEST_CASE("RHC estimator is exact when y is proportional to x") {
  std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6, 5, 3};
  std::vector<double> y;
  for (double v : x) y.push_back(2.5 * v);
  const auto pop = pop1(x, y);
  const double ybar = 2.5 * pop.x_bar();
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = draw(DesignKind::Rhc, pop, 4, rng);
    CHECK(estimate_mean(EstimatorKind::Rhc, s, pop, sample_h(Functional::mean(), pop, s))[0] ==
          doctest::Approx(ybar).epsilon(1e-13));
  }
}

TEST_CASE("equivariance and homogeneity") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 500, 13);
  Rng rng(4);
  for (auto design : {DesignKind::Srswor, DesignKind::Lms, DesignKind::RaoSampford, DesignKind::Rhc}) {
    const auto s = draw(design, pop, 20, rng);
    const auto h = sample_h(Functional::mean(), pop, s);
    Matrix shifted = h, scaled = h;
    for (std::size_t k = 0; k < h.rows(); ++k) {
      shifted(k, 0) += 123.0;
      scaled(k, 0) *= -3.0;
    }
    for (auto kind : {EstimatorKind::Ht, EstimatorKind::Hajek, EstimatorKind::Ratio,
                      EstimatorKind::Product, EstimatorKind::Rhc, EstimatorKind::Greg,
                      EstimatorKind::Peml}) {
      if (!is_valid_combination(kind, design)) {
        CHECK(code_of([&] { estimate_mean(kind, s, pop, h); }) == ErrorCode::Combination);
        continue;
      }
      const double base = estimate_mean(kind, s, pop, h)[0];
      CHECK(estimate_mean(kind, s, pop, scaled)[0] == doctest::Approx(-3.0 * base).epsilon(1e-12));
      if (kind == EstimatorKind::Greg || kind == EstimatorKind::Peml || kind == EstimatorKind::Hajek)
        CHECK(estimate_mean(kind, s, pop, shifted)[0] ==
              doctest::Approx(base + 123.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("Rao-Sampford: HT, Ratio and Product coincide") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 400, 17);
  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = draw(DesignKind::RaoSampford, pop, 30, rng);
    const auto h = sample_h(Functional::mean(), pop, s);
    const double ht = estimate_mean(EstimatorKind::Ht, s, pop, h)[0];
    CHECK(std::abs(estimate_mean(EstimatorKind::Ratio, s, pop, h)[0] - ht) <= 1e-12 * ht);
    CHECK(std::abs(estimate_mean(EstimatorKind::Product, s, pop, h)[0] - ht) <= 1e-12 * ht);
  }
}

TEST_CASE("PEML weights: special cases") {
  {
    const std::vector<double> d{1, 1, 1}, x{1, 2, 3};
    const auto w = peml_weights(d, x, 2.0);
    CHECK(w.lambda == doctest::Approx(0.0));
    for (double c : w.c) CHECK(c == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }
  {
    const std::vector<double> d{0.3, 5.0}, x{2, 6};
    const auto w = peml_weights(d, x, 3.0);
    CHECK(w.c[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(w.c[1] == doctest::Approx(0.25).epsilon(1e-12));
  }
  {
    const std::vector<double> d{1, 1}, x{2, 6};
    CHECK(code_of([&] { peml_weights(d, x, 7.0); }) == ErrorCode::Infeasible);
    CHECK(code_of([&] { peml_weights(d, x, 2.0); }) == ErrorCode::Infeasible);
  }
  {
    const std::vector<double> d{1, 1}, x{4, 4};
    const auto w = peml_weights(d, x, 4.0);
    CHECK(w.c[0] == doctest::Approx(0.5));
  }
}

TEST_CASE("PEML weights beat random feasible competitors (n = 3)") {
  const std::vector<double> d{1, 1, 1}, x{1, 2, 4};
  const double xb = 2.5;
  const auto w = peml_weights(d, x, xb);
  double s = 0, sx = 0;
  for (int i = 0; i < 3; ++i) {
    CHECK(w.c[i] > 0.0);
    s += w.c[i];
    sx += w.c[i] * (x[i] - xb);
  }
  CHECK(std::abs(s - 1.0) < 1e-10);
  CHECK(std::abs(sx) < 1e-10);
  const double best = peml_objective(d, w.c);

  // feasible set is the segment c = c0 + t v with v orthogonal to (1,1,1) and u
  const std::vector<double> u{-1.5, -0.5, 1.5};
  const std::vector<double> v{u[1] * 1 - u[2] * 1, u[2] * 1 - u[0] * 1, u[0] * 1 - u[1] * 1};
  double lo = -1e300, hi = 1e300;
  for (int i = 0; i < 3; ++i) {
    const double bound = -w.c[i] / v[i];
    if (v[i] > 0) lo = std::max(lo, bound);
    else hi = std::min(hi, bound);
  }
  Rng rng(77);
  for (int k = 0; k < 1000; ++k) {
    const double t = lo + (hi - lo) * (0.001 + 0.998 * rng.uniform());
    std::vector<double> c(3);
    for (int i = 0; i < 3; ++i) c[i] = w.c[i] + t * v[i];
    CHECK(peml_objective(d, c) <= best + 1e-14);
  }
  // fine grid over the segment agrees on the maximizer
  double grid_best = -1e300, grid_t = 0;
  for (int g = 1; g < 200000; ++g) {
    const double t = lo + (hi - lo) * g / 200000.0;
    std::vector<double> c(3);
    for (int i = 0; i < 3; ++i) c[i] = w.c[i] + t * v[i];
    const double o = peml_objective(d, c);
    if (o > grid_best) {
      grid_best = o;
      grid_t = t;
    }
  }
  CHECK(std::abs(grid_t) < 1e-4);
}

TEST_CASE("PEML approaches GREG as n grows") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 5000, 1);
  auto max_gap = [&](std::size_t n) {
    Rng rng(100 + n);
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto s = draw(DesignKind::Srswor, pop, n, rng);
      const auto h = sample_h(Functional::mean(), pop, s);
      worst = std::max(worst, std::abs(estimate_mean(EstimatorKind::Peml, s, pop, h)[0] -
                                       estimate_mean(EstimatorKind::Greg, s, pop, h)[0]));
    }
    return worst;
  };
  CHECK(max_gap(400) < 0.5 * max_gap(100));
}

TEST_CASE("degenerate GREG") {
  const auto pop = pop1({2, 2, 2, 5}, {1, 2, 3, 4});
  const auto s = pi_sample(DesignKind::Srswor, {0, 1, 2}, {0.75, 0.75, 0.75});
  CHECK(code_of([&] { estimate_mean(EstimatorKind::Greg, s, pop, column({1, 2, 3})); }) ==
        ErrorCode::Degenerate);
}

TEST_CASE("estimator names and validity") {
  CHECK(parse_estimator("PEML") == EstimatorKind::Peml);
  CHECK(parse_estimator("hajek") == EstimatorKind::Hajek);
  CHECK(parse_estimator("RHCEst") == EstimatorKind::Rhc);
  CHECK_FALSE(parse_estimator("calib").has_value());
  CHECK(is_valid_combination(EstimatorKind::Peml, DesignKind::Rhc));
  CHECK_FALSE(is_valid_combination(EstimatorKind::Ht, DesignKind::Rhc));
  CHECK_FALSE(is_valid_combination(EstimatorKind::Rhc, DesignKind::Srswor));
}

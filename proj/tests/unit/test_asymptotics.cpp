#include <cmath>

#include "asymptotics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace svy;
using testutil::code_of;

namespace {

// The Delta^2 table transcribed term by term, independent of the library code.
std::vector<double> table3(const std::vector<double>& X, const std::vector<double>& W,
                           std::size_t n) {
  const double N = X.size(), lam = n / N;
  double xb = 0, wb = 0, x2 = 0, w2 = 0, xw = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    xb += X[i] / N;
    wb += W[i] / N;
    x2 += X[i] * X[i] / N;
    w2 += W[i] * W[i] / N;
    xw += X[i] * W[i] / N;
  }
  const double Sx2 = x2 - xb * xb, Sw2 = w2 - wb * wb, Sxw = xw - xb * wb;
  const double phi = xb - lam * x2 / xb;
  const auto sizes = rhc_group_sizes(X.size(), n);
  double gam = 0;
  for (auto s : sizes) gam += double(s) * (s - 1);
  gam /= N * (N - 1);

  std::vector<double> d(9, 0.0);
  d[0] = (1 - lam) * (Sw2 - Sxw * Sxw / Sx2);
  d[1] = (1 - lam) * Sw2;
  d[2] = (1 - lam) * (Sw2 - 2 * wb * Sxw / xb + (wb / xb) * (wb / xb) * Sx2);
  d[3] = (1 - lam) * (Sw2 + 2 * wb * Sxw / xb + (wb / xb) * (wb / xb) * Sx2);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double wt = xb / X[i] - lam;
    const double r = W[i] - wb - (Sxw / Sx2) * (X[i] - xb);
    d[4] += r * r * wt / N;
    const double a = W[i] + X[i] / (phi * xb) * (lam * xw - wb * xb);
    d[5] += a * a * wt / N;
    const double b = W[i] - wb + lam / (phi * xb) * X[i] * Sxw;
    d[6] += b * b * wt / N;
    d[7] += n * gam * (xb / N) * r * r / X[i];
    d[8] += n * gam * (xb / N) * W[i] * W[i] / X[i];
  }
  d[8] -= n * gam * wb * wb;
  return d;
}

}  // namespace

TEST_CASE("gamma coefficient") {
  CHECK(gamma_coeff(10, 5) == doctest::Approx(1.0 / 9).epsilon(1e-15));
  CHECK(5 * gamma_coeff(10, 5) == doctest::Approx(5.0 / 9).epsilon(1e-15));
  CHECK(gamma_coeff(7, 3) == doctest::Approx(5.0 / 21).epsilon(1e-15));
  CHECK(n_gamma_limit(0.1) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(std::abs(100 * gamma_coeff(1000, 100) / 0.9 - 1.0) < 0.02);
  // n | N: n gamma = (N - n) / (N - 1)
  for (std::size_t n : {2u, 4u, 5u, 8u, 10u, 20u})
    CHECK(n * gamma_coeff(40, n) == doctest::Approx((40.0 - n) / 39.0).epsilon(1e-14));
}

TEST_CASE("delta_sq matches an independent transcription of the Delta^2 table") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pop = generate(LinearModelSpec::univariate_default(), 300, seed);
    for (auto f : {Functional::mean(), Functional::variance()}) {
      const auto ctx = make_context(pop, f, 30);
      const auto want = table3(ctx.x, ctx.w, 30);
      for (int j = 1; j <= 9; ++j)
        CHECK(delta_sq(j, ctx) == doctest::Approx(want[j - 1]).epsilon(1e-10));
    }
  }
}

TEST_CASE("delta_sq special cases") {
  const std::vector<double> x{1, 2, 3, 5, 8, 13};
  {
    const auto ctx = make_context(x, std::vector<double>(6, 4.0), 2);
    CHECK(std::abs(delta_sq(1, ctx)) < 1e-12);
    CHECK(std::abs(delta_sq(2, ctx)) < 1e-12);
  }
  {
    std::vector<double> w;
    for (double v : x) w.push_back(-1.7 * v);
    const auto ctx = make_context(x, w, 3);
    CHECK(std::abs(delta_sq(8, ctx)) < 1e-10);
    CHECK(std::abs(delta_sq(9, ctx)) < 1e-10);
  }
  {
    // force phi = 0
    auto ctx = make_context({1.0, 3.0, 4.0, 6.0}, {1.0, 2.0, 2.5, 7.0}, 2);
    ctx.phi = 0.0;
    CHECK(code_of([&] { delta_sq(6, ctx); }) == ErrorCode::Singularity);
    CHECK(code_of([&] { delta_sq(7, ctx); }) == ErrorCode::Singularity);
  }
  CHECK(code_of([&] { delta_sq(10, make_context(x, x, 2)); }) == ErrorCode::Parameter);
}

TEST_CASE("Delta^2 identities on random populations") {
  Rng rng(2718);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t N = 20 + rng.below(200);
    std::vector<double> x(N), w(N);
    for (std::size_t i = 0; i < N; ++i) {
      x[i] = 0.1 + 10 * rng.uniform();
      w[i] = 3 * rng.uniform() - 1 + 0.5 * x[i] * rng.uniform();
    }
    const std::size_t n = 2 + rng.below(N / 2);
    const auto ctx = make_context(x, w, n);
    const double lhs = delta_sq(2, ctx) - delta_sq(1, ctx);
    const double rhs = (1 - ctx.lambda) * ctx.s_xw * ctx.s_xw / ctx.s2_x;
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(rhs), 1e-300));
    for (int j : {2, 3, 4}) CHECK(delta_sq(1, ctx) <= delta_sq(j, ctx) + 1e-12);
    for (int j = 1; j <= 9; ++j) CHECK(delta_sq(j, ctx) >= -1e-10);
  }
}

TEST_CASE("x scaling leaves gamma and classes 5-9 unchanged") {
  const auto pop = generate(LinearModelSpec::univariate_default(), 400, 6);
  const auto a = make_context(pop, Functional::mean(), 40);
  std::vector<double> xs;
  for (double v : a.x) xs.push_back(v * 0.004);
  const auto b = make_context(xs, a.w, 40);
  CHECK(a.gamma == b.gamma);
  for (int j = 5; j <= 9; ++j)
    CHECK(delta_sq(j, b) == doctest::Approx(delta_sq(j, a)).epsilon(1e-10));
}

TEST_CASE("equivalence classes") {
  using E = EstimatorKind;
  using D = DesignKind;
  CHECK(equivalence_class(E::Peml, D::Srswor) == 1);
  CHECK(equivalence_class(E::Greg, D::Lms) == 1);
  CHECK(equivalence_class(E::Ht, D::Srswor) == 2);
  CHECK(equivalence_class(E::Hajek, D::Lms) == 2);
  CHECK(equivalence_class(E::Ratio, D::Srswor) == 3);
  CHECK(equivalence_class(E::Product, D::Lms) == 4);
  CHECK(equivalence_class(E::Peml, D::RaoSampford) == 5);
  CHECK(equivalence_class(E::Ratio, D::RaoSampford) == 6);
  CHECK(equivalence_class(E::Ht, D::RaoSampford) == 6);
  CHECK(equivalence_class(E::Product, D::RaoSampford) == 6);
  CHECK(equivalence_class(E::Hajek, D::RaoSampford) == 7);
  CHECK(equivalence_class(E::Greg, D::Rhc) == 8);
  CHECK(equivalence_class(E::Rhc, D::Rhc) == 9);
  CHECK(equivalence_class(E::Rhc, D::Rhc, true) == 6);
  CHECK(equivalence_class(E::Peml, D::Rhc, true) == 5);
  CHECK(code_of([] { equivalence_class(E::Ht, D::Rhc); }) == ErrorCode::Combination);
}

TEST_CASE("condition C6") {
  // gamma(k = 25, theta = 0.2), closed-form moments
  const double k = 25, th = 0.2;
  MomentSummary m;
  m.mu1 = k * th;
  m.mu2 = k * (k + 1) * th * th;
  m.mu3 = k * (k + 1) * (k + 2) * th * th * th;
  m.mu_m1 = 1.0 / ((k - 1) * th);
  CHECK(m.xi() == doctest::Approx(10.4).epsilon(1e-12));
  CHECK(check_c6(m));

  CHECK(code_of([] { check_c6(moments_of({2.0, 2.0, 2.0})); }) == ErrorCode::UndefinedParameter);

  MomentSummary bad{0.6, 2.0, 4.0, 7.0};  // xi = 7 - 8 < 0
  CHECK_FALSE(check_c6(bad));

  const auto mm = moments_of({1, 2, 4});
  CHECK(mm.mu1 == doctest::Approx(7.0 / 3));
  CHECK(mm.mu_m1 == doctest::Approx((1 + 0.5 + 0.25) / 3));
}

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "designs.hpp"
#include "estimators.hpp"
#include "functionals.hpp"
#include "population.hpp"

namespace svy {

// sum_j N_j (N_j - 1) / (N (N - 1)) over the random-group sizes.
double gamma_coeff(std::size_t N, std::size_t n);

// Large-population limit of n * gamma at sampling fraction lambda in (0, 1):
// lambda*floor(1/lambda)*(2 - lambda*floor(1/lambda) - lambda).
double n_gamma_limit(double lambda);

/// Finite-population versions of the asymptotic design constants, with
/// lambda replaced by n/N and W_i = grad g(h_bar) . h_i.
struct AsymptoticContext {
  std::size_t N = 0;
  std::size_t n = 0;
  double lambda = 0.0;
  std::vector<double> x;
  std::vector<double> w;
  double x_bar = 0.0;
  double w_bar = 0.0;
  double s2_x = 0.0;
  double s2_w = 0.0;
  double s_xw = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
};

AsymptoticContext make_context(const Population& pop, const Functional& f,
                               std::size_t n);

// Context from explicit W values (for checks that fix W directly).
AsymptoticContext make_context(const std::vector<double>& x,
                               const std::vector<double>& w, std::size_t n);

// Asymptotic MSE of class 1..9. Classes 6 and 7 raise Singularity when phi = 0.
double delta_sq(int class_id, const AsymptoticContext& ctx);

// Equivalence class of an (estimator, design) pair; with lambda_zero the RHC
// classes merge into the piPS ones (8 -> 5, 9 -> 6).
int equivalence_class(EstimatorKind kind, DesignKind design, bool lambda_zero = false);

struct MomentSummary {
  double mu_m1 = 0.0;  // E X^-1
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
  double xi() const noexcept { return mu3 - mu2 * mu1; }
};

MomentSummary moments_of(const std::vector<double>& x);

// xi > 2 max{mu1, mu_-1 / (mu1 mu_-1 - 1)}. UndefinedParameter when
// mu1 mu_-1 <= 1 (degenerate x).
bool check_c6(const MomentSummary& m);

}  // namespace svy

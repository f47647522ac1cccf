#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "designs.hpp"
#include "matrix.hpp"
#include "population.hpp"

namespace svy {

enum class EstimatorKind { Ht, Hajek, Ratio, Product, Rhc, Greg, Peml };

std::string_view to_string(EstimatorKind k) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept;

// Which estimators are defined on which design family.
bool is_valid_combination(EstimatorKind kind, DesignKind design) noexcept;
void require_valid_combination(EstimatorKind kind, DesignKind design);

// d(i,s): 1/(N pi_i) for pi designs, G_i/(N x_i) for RHC.
std::vector<double> design_weights(const SampleDraw& sample, const Population& pop);

struct CalibratedWeights {
  std::vector<double> c;
  double lambda = 0.0;
  int iterations = 0;
};

inline constexpr int kPemlMaxIterations = 200;
inline constexpr double kPemlTolerance = 1e-12;

/// Maximizes sum d~_i log c_i subject to sum c_i = 1 and
/// sum c_i (x_i - x_bar) = 0, where d~ = d / sum d.
///
/// The dual reduces to one root: c_i = d~_i / (1 + lambda u_i), u_i = x_i - x_bar,
/// with lambda the zero of f(lambda) = sum d~_i u_i / (1 + lambda u_i). f is
/// strictly decreasing on the interval where every 1 + lambda u_i > 0, and runs
/// from +inf to -inf across it, so a safeguarded Newton iteration with a
/// bisection fallback always brackets the root.
///
/// Infeasible when x_bar is not strictly inside (min x_s, max x_s) unless every
/// x_s equals x_bar. Convergence error after kPemlMaxIterations.
CalibratedWeights peml_weights(std::span<const double> d,
                               std::span<const double> x_sample, double x_bar);

// Objective sum d~_i log c_i used by tests and diagnostics.
double peml_objective(std::span<const double> d, std::span<const double> c);

// Rows of `h` are aligned with sample.indices. Returns one estimate per column.
std::vector<double> estimate_mean(EstimatorKind kind, const SampleDraw& sample,
                                  const Population& pop, const Matrix& h);

// Sampled x values in sample order.
std::vector<double> sample_x(const SampleDraw& sample, const Population& pop);

}  // namespace svy

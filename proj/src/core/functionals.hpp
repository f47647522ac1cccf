#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "designs.hpp"
#include "estimators.hpp"
#include "matrix.hpp"
#include "population.hpp"

namespace svy {

enum class FunctionalKind { Mean, Variance, Correlation, RegressionCoef };

/// A population parameter g(mean of h(y)). `columns` picks the study
/// coordinates the functional reads, in order: one for Mean/Variance, two for
/// Correlation, and (of, on) for RegressionCoef.
struct Functional {
  FunctionalKind kind = FunctionalKind::Mean;
  std::vector<std::size_t> columns{0};

  static Functional mean(std::size_t col = 0) { return {FunctionalKind::Mean, {col}}; }
  static Functional variance(std::size_t col = 0) {
    return {FunctionalKind::Variance, {col}};
  }
  static Functional correlation(std::size_t a = 0, std::size_t b = 1) {
    return {FunctionalKind::Correlation, {a, b}};
  }
  // Regression coefficient of column `of` on column `on`.
  static Functional regression(std::size_t of = 0, std::size_t on = 1) {
    return {FunctionalKind::RegressionCoef, {of, on}};
  }

  std::size_t d() const noexcept;  // input dimension
  std::size_t p() const noexcept;  // h output dimension

  std::string name() const;

  bool operator==(const Functional&) const = default;
};

// "mean", "variance:1", "correlation:0,1", "regression:0,1" (0 on 1).
std::optional<Functional> parse_functional(std::string_view text);

// Applies h row by row; `rows` must have exactly f.d() columns.
Matrix h_transform(const Functional& f, const Matrix& rows);

// Selected study columns for the given units (all units when `units` is empty).
Matrix select_study(const Functional& f, const Population& pop,
                    std::span<const std::size_t> units = {});

// h of the sampled units, rows aligned with sample.indices.
Matrix sample_h(const Functional& f, const Population& pop, const SampleDraw& sample);

// g and its analytic gradient. UndefinedParameter when a variance term in a
// denominator is not strictly positive.
double g_eval(const Functional& f, std::span<const double> s);
std::vector<double> g_grad(const Functional& f, std::span<const double> s);

// Mean of h over the whole population.
std::vector<double> population_h_mean(const Functional& f, const Population& pop);

// g evaluated at the population mean of h.
double population_value(const Functional& f, const Population& pop);

// Correlation and regression coefficients only admit the self-normalizing
// (Hajek, PEML) plug-ins; anything else is a Combination error.
void require_plug_in_kind(const Functional& f, EstimatorKind kind);

double plug_in(const Functional& f, EstimatorKind kind, const SampleDraw& sample,
               const Population& pop);

}  // namespace svy

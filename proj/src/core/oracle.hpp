#pragma once

#include <cstddef>

#include "designs.hpp"
#include "estimators.hpp"
#include "functionals.hpp"
#include "population.hpp"

namespace svy {

/// Exact design moments of g(h_hat) from the full enumerated support.
struct ExactSummary {
  double expectation = 0.0;
  double truth = 0.0;  // g(h_bar) over the population
  double variance = 0.0;
  double mse = 0.0;
  std::size_t support_size = 0;

  double bias() const noexcept { return expectation - truth; }
};

// Any undefined estimate on the support is an error; exact mode tolerates none.
ExactSummary exact_moments(DesignKind design, const Population& pop, std::size_t n,
                           EstimatorKind kind, const Functional& f);

struct FormulaComparison {
  double exact_n_mse = 0.0;
  int class_id = 0;
  double delta_sq = 0.0;
};

FormulaComparison exact_vs_formula(DesignKind design, const Population& pop,
                                   std::size_t n, const Functional& f,
                                   EstimatorKind kind);

}  // namespace svy

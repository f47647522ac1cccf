#include "oracle.hpp"

#include "asymptotics.hpp"
#include "error.hpp"

namespace svy {

ExactSummary exact_moments(DesignKind design, const Population& pop, std::size_t n,
                           EstimatorKind kind, const Functional& f) {
  require_valid_combination(kind, design);
  require_plug_in_kind(f, kind);
  const auto support = enumerate_design(design, pop, n);
  ExactSummary out;
  out.truth = population_value(f, pop);
  out.support_size = support.size();

  std::vector<double> values;
  values.reserve(support.size());
  double mean = 0.0;
  double mass = 0.0;
  for (const auto& ws : support) {
    const double g = plug_in(f, kind, ws.sample, pop);
    values.push_back(g);
    mean += ws.probability * g;
    mass += ws.probability;
  }
  mean /= mass;
  double var = 0.0, mse = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const double p = support[k].probability / mass;
    var += p * (values[k] - mean) * (values[k] - mean);
    mse += p * (values[k] - out.truth) * (values[k] - out.truth);
  }
  out.expectation = mean;
  out.variance = var;
  out.mse = mse;
  return out;
}

FormulaComparison exact_vs_formula(DesignKind design, const Population& pop,
                                   std::size_t n, const Functional& f,
                                   EstimatorKind kind) {
  const auto exact = exact_moments(design, pop, n, kind, f);
  FormulaComparison out;
  out.exact_n_mse = static_cast<double>(n) * exact.mse;
  out.class_id = equivalence_class(kind, design);
  out.delta_sq = delta_sq(out.class_id, make_context(pop, f, n));
  return out;
}

}  // namespace svy

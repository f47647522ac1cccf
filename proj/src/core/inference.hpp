#pragma once

#include <cstddef>

#include "designs.hpp"
#include "estimators.hpp"
#include "functionals.hpp"
#include "population.hpp"

namespace svy {

struct ConfidenceInterval {
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.95;

  double lower() const noexcept { return center - half_width; }
  double upper() const noexcept { return center + half_width; }
  double length() const noexcept { return 2.0 * half_width; }
  bool contains(double v) const noexcept { return lower() <= v && v <= upper(); }
};

// Estimated asymptotic variance of sqrt(n)(g(h_hat) - g(h_bar)) under an
// inclusion-probability design. kind in {HT, Hajek, GREG, PEML}.
double variance_est_pi(const SampleDraw& sample, const Population& pop,
                       const Functional& f, EstimatorKind kind);

// Same under RHC sampling. kind in {RHC, GREG, PEML}.
double variance_est_rhc(const SampleDraw& sample, const Population& pop,
                        const Functional& f, EstimatorKind kind);

// Dispatches on the sample's design.
double variance_est(const SampleDraw& sample, const Population& pop,
                    const Functional& f, EstimatorKind kind);

// Whether a variance estimate (and hence a CI) exists for the pair.
bool has_variance_estimator(EstimatorKind kind, DesignKind design) noexcept;

double normal_quantile(double p);

ConfidenceInterval confidence_interval(double point, double var_est, std::size_t n,
                                       double level = 0.95);

/// n g(h_hat) - (n - 1) mean_i g(h_hat_{-i}). Leave-one-out samples keep each
/// remaining unit's original pi_i or G_i; Hajek, GREG and PEML renormalize on
/// their own. JackknifeFailure names the unit whose deletion breaks the estimate.
double jackknife_bc(const SampleDraw& sample, const Population& pop,
                    const Functional& f, EstimatorKind kind);

}  // namespace svy

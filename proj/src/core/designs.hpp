#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "population.hpp"
#include "rng.hpp"

namespace svy {

enum class DesignKind { Srswor, Lms, RaoSampford, Rhc };

std::string_view to_string(DesignKind d) noexcept;
std::optional<DesignKind> parse_design(std::string_view name) noexcept;

inline bool is_pi_design(DesignKind d) noexcept { return d != DesignKind::Rhc; }

/// One drawn sample. Units are stored in increasing index order (0-based);
/// `pi` is filled for inclusion-probability designs and `g_totals` (the
/// x-total of the random group each unit was picked from) for RHC.
struct SampleDraw {
  DesignKind design = DesignKind::Srswor;
  std::vector<std::size_t> indices;
  std::vector<double> pi;
  std::vector<double> g_totals;

  std::size_t n() const noexcept { return indices.size(); }

  // Copy with the k-th carried unit removed (per-unit metadata unchanged).
  SampleDraw without(std::size_t k) const;
};

inline constexpr std::size_t kRaoSampfordRetryCap = 1'000'000;
inline constexpr std::size_t kEnumerationCap = 1'000'000;

// Length-N inclusion probabilities. RHC is rejected (Unsupported); a
// Rao-Sampford request with n * max x >= sum x is Infeasible.
std::vector<double> inclusion_probabilities(DesignKind design,
                                            const Population& pop,
                                            std::size_t n);

// Group sizes for the random-group scheme: floor/ceil of N/n, nondecreasing.
std::vector<std::size_t> rhc_group_sizes(std::size_t N, std::size_t n);

/// Draws samples of fixed size from one population. Holds the cumulative
/// tables so repeated draws do not rebuild them.
class Sampler {
 public:
  Sampler(DesignKind design, const Population& pop, std::size_t n);

  DesignKind design() const noexcept { return design_; }
  std::size_t n() const noexcept { return n_; }

  SampleDraw draw(Rng& rng) const;

 private:
  SampleDraw draw_srswor(Rng& rng) const;
  SampleDraw draw_lms(Rng& rng) const;
  SampleDraw draw_rao_sampford(Rng& rng) const;
  SampleDraw draw_rhc(Rng& rng) const;

  DesignKind design_;
  const Population* pop_;
  std::size_t n_;
  std::vector<double> pi_;            // per population unit (pi designs)
  std::vector<double> cum_x_;         // cumulative x, for PPS picks
  std::vector<double> cum_sampford_;  // cumulative p/(1 - n p)
  std::vector<std::size_t> sizes_;    // RHC group sizes
};

SampleDraw draw(DesignKind design, const Population& pop, std::size_t n,
                Rng& rng);

struct WeightedSample {
  SampleDraw sample;
  double probability = 0.0;
};

// Full support of the design with exact probabilities. SRSWOR/LMS list every
// n-subset; RHC lists every (labelled grouping, per-group pick) outcome.
std::vector<WeightedSample> enumerate_design(DesignKind design,
                                             const Population& pop,
                                             std::size_t n);

}  // namespace svy

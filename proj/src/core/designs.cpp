#include "designs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace svy {

std::string_view to_string(DesignKind d) noexcept {
  switch (d) {
    case DesignKind::Srswor: return "SRSWOR";
    case DesignKind::Lms: return "LMS";
    case DesignKind::RaoSampford: return "RS";
    case DesignKind::Rhc: return "RHC";
  }
  return "?";
}

std::optional<DesignKind> parse_design(std::string_view name) noexcept {
  std::string up(name);
  for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "SRSWOR" || up == "SRS") return DesignKind::Srswor;
  if (up == "LMS") return DesignKind::Lms;
  if (up == "RS" || up == "RAOSAMPFORD" || up == "RAO-SAMPFORD" || up == "SAMPFORD")
    return DesignKind::RaoSampford;
  if (up == "RHC") return DesignKind::Rhc;
  return std::nullopt;
}

SampleDraw SampleDraw::without(std::size_t k) const {
  SampleDraw out = *this;
  out.indices.erase(out.indices.begin() + static_cast<std::ptrdiff_t>(k));
  if (!out.pi.empty()) out.pi.erase(out.pi.begin() + static_cast<std::ptrdiff_t>(k));
  if (!out.g_totals.empty())
    out.g_totals.erase(out.g_totals.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

namespace {

void check_size(const Population& pop, std::size_t n) {
  if (n < 2 || n >= pop.size())
    fail(ErrorCode::Parameter, "sample size must satisfy 2 <= n < N (n=" +
                                   std::to_string(n) + ", N=" +
                                   std::to_string(pop.size()) + ")");
}

void check_pips_feasible(const Population& pop, std::size_t n) {
  std::string offending;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (static_cast<double>(n) * pop.x()[i] >= pop.x_total()) {
      if (count < 20) offending += (count ? ", " : "") + std::to_string(i + 1);
      ++count;
    }
  }
  if (count)
    fail(ErrorCode::Infeasible,
         "piPS design infeasible: n*x_i/sum(x) >= 1 for unit(s) " + offending +
             (count > 20 ? " ..." : ""));
}

std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> cum(w.size());
  std::partial_sum(w.begin(), w.end(), cum.begin());
  return cum;
}

std::size_t pick(const std::vector<double>& cum, Rng& rng) {
  const double u = rng.uniform() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()),
                               cum.size() - 1);
}

// Sorts units by index, carrying per-unit metadata along.
void canonicalize(SampleDraw& s) {
  std::vector<std::size_t> order(s.indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.indices[a] < s.indices[b]; });
  auto permute = [&](auto& v) {
    if (v.empty()) return;
    auto copy = v;
    for (std::size_t k = 0; k < order.size(); ++k) v[k] = copy[order[k]];
  };
  permute(s.indices);
  permute(s.pi);
  permute(s.g_totals);
}

double log_choose(std::size_t N, std::size_t k) {
  return std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0);
}

}  // namespace

std::vector<double> inclusion_probabilities(DesignKind design,
                                            const Population& pop,
                                            std::size_t n) {
  check_size(pop, n);
  const auto N = static_cast<double>(pop.size());
  const auto nn = static_cast<double>(n);
  std::vector<double> pi(pop.size());
  switch (design) {
    case DesignKind::Srswor:
      std::fill(pi.begin(), pi.end(), nn / N);
      break;
    case DesignKind::Lms:
      for (std::size_t i = 0; i < pop.size(); ++i)
        pi[i] = (nn - 1.0) / (N - 1.0) +
                (pop.x()[i] / pop.x_total()) * ((N - nn) / (N - 1.0));
      break;
    case DesignKind::RaoSampford:
      check_pips_feasible(pop, n);
      for (std::size_t i = 0; i < pop.size(); ++i)
        pi[i] = nn * pop.x()[i] / pop.x_total();
      break;
    case DesignKind::Rhc:
      fail(ErrorCode::Unsupported,
           "RHC has no fixed inclusion probabilities; use per-draw group totals");
  }
  return pi;
}

std::vector<std::size_t> rhc_group_sizes(std::size_t N, std::size_t n) {
  if (n < 2 || n >= N)
    fail(ErrorCode::Parameter, "group count must satisfy 2 <= n < N");
  const std::size_t q = N / n;
  const std::size_t r = N % n;
  std::vector<std::size_t> sizes(n, q);
  for (std::size_t j = n - r; j < n; ++j) sizes[j] = q + 1;
  return sizes;
}

Sampler::Sampler(DesignKind design, const Population& pop, std::size_t n)
    : design_(design), pop_(&pop), n_(n) {
  check_size(pop, n);
  switch (design) {
    case DesignKind::Srswor:
    case DesignKind::Lms:
      pi_ = inclusion_probabilities(design, pop, n);
      cum_x_ = cumulative(pop.x());
      break;
    case DesignKind::RaoSampford: {
      pi_ = inclusion_probabilities(design, pop, n);
      cum_x_ = cumulative(pop.x());
      std::vector<double> w(pop.size());
      for (std::size_t i = 0; i < pop.size(); ++i) {
        const double p = pop.x()[i] / pop.x_total();
        w[i] = p / (1.0 - static_cast<double>(n) * p);
      }
      cum_sampford_ = cumulative(w);
      break;
    }
    case DesignKind::Rhc:
      sizes_ = rhc_group_sizes(pop.size(), n);
      break;
  }
}

SampleDraw Sampler::draw(Rng& rng) const {
  switch (design_) {
    case DesignKind::Srswor: return draw_srswor(rng);
    case DesignKind::Lms: return draw_lms(rng);
    case DesignKind::RaoSampford: return draw_rao_sampford(rng);
    case DesignKind::Rhc: return draw_rhc(rng);
  }
  fail(ErrorCode::Parameter, "unknown design");
}

SampleDraw Sampler::draw_srswor(Rng& rng) const {
  // Floyd's algorithm: n distinct indices in O(n) expected work.
  const std::size_t N = pop_->size();
  SampleDraw s;
  s.design = design_;
  s.indices.reserve(n_);
  std::vector<char> taken(N, 0);
  for (std::size_t j = N - n_; j < N; ++j) {
    const std::size_t t = rng.below(j + 1);
    const std::size_t pick_idx = taken[t] ? j : t;
    taken[pick_idx] = 1;
    s.indices.push_back(pick_idx);
  }
  std::sort(s.indices.begin(), s.indices.end());
  for (auto i : s.indices) s.pi.push_back(pi_[i]);
  return s;
}

SampleDraw Sampler::draw_lms(Rng& rng) const {
  // First unit with probability x_i / sum x, then SRSWOR of n-1 from the rest.
  const std::size_t N = pop_->size();
  const std::size_t first = pick(cum_x_, rng);
  std::vector<char> taken(N, 0);
  taken[first] = 1;
  SampleDraw s;
  s.design = design_;
  s.indices.push_back(first);
  // Floyd over the N-1 remaining units, relabelled to skip `first`.
  const std::size_t M = N - 1;
  const std::size_t m = n_ - 1;
  std::vector<char> chosen(M, 0);
  for (std::size_t j = M - m; j < M; ++j) {
    const std::size_t t = rng.below(j + 1);
    const std::size_t k = chosen[t] ? j : t;
    chosen[k] = 1;
    s.indices.push_back(k < first ? k : k + 1);
  }
  std::sort(s.indices.begin(), s.indices.end());
  for (auto i : s.indices) s.pi.push_back(pi_[i]);
  return s;
}

SampleDraw Sampler::draw_rao_sampford(Rng& rng) const {
  const std::size_t N = pop_->size();
  std::vector<std::uint32_t> seen(N, 0);
  std::uint32_t stamp = 0;
  std::vector<std::size_t> units;
  units.reserve(n_);
  for (std::size_t attempt = 0; attempt < kRaoSampfordRetryCap; ++attempt) {
    if (++stamp == 0) {
      std::fill(seen.begin(), seen.end(), 0);
      stamp = 1;
    }
    units.clear();
    std::size_t u = pick(cum_x_, rng);
    seen[u] = stamp;
    units.push_back(u);
    bool distinct = true;
    while (units.size() < n_) {
      u = pick(cum_sampford_, rng);
      if (seen[u] == stamp) {
        distinct = false;
        break;
      }
      seen[u] = stamp;
      units.push_back(u);
    }
    if (!distinct) continue;
    SampleDraw s;
    s.design = design_;
    s.indices = units;
    std::sort(s.indices.begin(), s.indices.end());
    for (auto i : s.indices) s.pi.push_back(pi_[i]);
    return s;
  }
  fail(ErrorCode::DrawFailure, "Rao-Sampford rejective draw exceeded " +
                                   std::to_string(kRaoSampfordRetryCap) +
                                   " attempts");
}

SampleDraw Sampler::draw_rhc(Rng& rng) const {
  const std::size_t N = pop_->size();
  std::vector<std::size_t> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = N - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  SampleDraw s;
  s.design = design_;
  const auto& x = pop_->x();
  std::size_t start = 0;
  for (std::size_t size : sizes_) {
    double total = 0.0;
    for (std::size_t k = start; k < start + size; ++k) total += x[perm[k]];
    double u = rng.uniform() * total;
    std::size_t chosen = perm[start + size - 1];
    for (std::size_t k = start; k < start + size; ++k) {
      u -= x[perm[k]];
      if (u < 0.0) {
        chosen = perm[k];
        break;
      }
    }
    s.indices.push_back(chosen);
    s.g_totals.push_back(total);
    start += size;
  }
  canonicalize(s);
  return s;
}

SampleDraw draw(DesignKind design, const Population& pop, std::size_t n,
                Rng& rng) {
  return Sampler(design, pop, n).draw(rng);
}

namespace {

// Visits every k-subset of `pool` in lexicographic order.
template <class F>
void for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, F&& f) {
  std::vector<std::size_t> pos(k);
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<std::size_t> subset(k);
  const std::size_t m = pool.size();
  while (true) {
    for (std::size_t j = 0; j < k; ++j) subset[j] = pool[pos[j]];
    f(subset);
    std::size_t j = k;
    while (j > 0 && pos[j - 1] == m - k + (j - 1)) --j;
    if (j == 0) return;
    ++pos[j - 1];
    for (std::size_t t = j; t < k; ++t) pos[t] = pos[t - 1] + 1;
  }
}

void enumerate_rhc(const Population& pop, const std::vector<std::size_t>& sizes,
                   std::vector<WeightedSample>& out) {
  const std::size_t N = pop.size();
  double log_grouping_prob = -std::lgamma(N + 1.0);
  for (auto sz : sizes) log_grouping_prob += std::lgamma(sz + 1.0);
  const double grouping_prob = std::exp(log_grouping_prob);

  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> totals;

  auto emit = [&]() {
    // Cartesian product of one pick per group.
    std::vector<std::size_t> choice(groups.size(), 0);
    while (true) {
      WeightedSample ws;
      ws.sample.design = DesignKind::Rhc;
      double p = grouping_prob;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::size_t unit = groups[g][choice[g]];
        ws.sample.indices.push_back(unit);
        ws.sample.g_totals.push_back(totals[g]);
        p *= pop.x()[unit] / totals[g];
      }
      ws.probability = p;
      canonicalize(ws.sample);
      out.push_back(std::move(ws));
      std::size_t g = 0;
      while (g < groups.size() && ++choice[g] == groups[g].size()) choice[g++] = 0;
      if (g == groups.size()) return;
    }
  };

  auto recurse = [&](auto&& self, const std::vector<std::size_t>& remaining,
                     std::size_t level) -> void {
    if (level == sizes.size()) {
      emit();
      return;
    }
    for_each_subset(remaining, sizes[level], [&](const std::vector<std::size_t>& grp) {
      std::vector<std::size_t> rest;
      rest.reserve(remaining.size() - grp.size());
      std::set_difference(remaining.begin(), remaining.end(), grp.begin(),
                          grp.end(), std::back_inserter(rest));
      double total = 0.0;
      for (auto u : grp) total += pop.x()[u];
      groups.push_back(grp);
      totals.push_back(total);
      self(self, rest, level + 1);
      groups.pop_back();
      totals.pop_back();
    });
  };

  std::vector<std::size_t> all(N);
  std::iota(all.begin(), all.end(), 0);
  recurse(recurse, all, 0);
}

}  // namespace

std::vector<WeightedSample> enumerate_design(DesignKind design,
                                             const Population& pop,
                                             std::size_t n) {
  check_size(pop, n);
  const std::size_t N = pop.size();
  const double cap = static_cast<double>(kEnumerationCap);
  std::vector<WeightedSample> out;

  if (design == DesignKind::RaoSampford)
    fail(ErrorCode::Unsupported,
         "exact Rao-Sampford design probabilities are not implemented");

  if (design == DesignKind::Rhc) {
    const auto sizes = rhc_group_sizes(N, n);
    double log_count = std::lgamma(N + 1.0);
    for (auto sz : sizes) log_count += std::log(static_cast<double>(sz)) - std::lgamma(sz + 1.0);
    if (log_count > std::log(cap) + 1e-9)
      fail(ErrorCode::EnumerationTooLarge,
           "RHC support has ~" + std::to_string(std::exp(log_count)) +
               " outcomes (cap " + std::to_string(kEnumerationCap) + ")");
    enumerate_rhc(pop, sizes, out);
    return out;
  }

  const double log_subsets = log_choose(N, n);
  if (log_subsets > std::log(cap) + 1e-9)
    fail(ErrorCode::EnumerationTooLarge,
         "design has ~" + std::to_string(std::exp(log_subsets)) +
             " samples (cap " + std::to_string(kEnumerationCap) + ")");
  const double count = std::round(std::exp(log_subsets));
  const auto pi = inclusion_probabilities(design, pop, n);

  std::vector<std::size_t> all(N);
  std::iota(all.begin(), all.end(), 0);
  for_each_subset(all, n, [&](const std::vector<std::size_t>& subset) {
    WeightedSample ws;
    ws.sample.design = design;
    ws.sample.indices = subset;
    for (auto i : subset) ws.sample.pi.push_back(pi[i]);
    if (design == DesignKind::Srswor) {
      ws.probability = 1.0 / count;
    } else {
      // P(s) = (mean of x over s / population mean of x) / C(N, n)
      double sx = 0.0;
      for (auto i : subset) sx += pop.x()[i];
      ws.probability = (sx / static_cast<double>(n)) / pop.x_bar() / count;
    }
    out.push_back(std::move(ws));
  });
  return out;
}

}  // namespace svy

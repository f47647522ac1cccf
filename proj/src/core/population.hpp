#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "matrix.hpp"

namespace svy {

/// A finite population: positive size values x_1..x_N and an N x d matrix of
/// study values. Immutable once constructed.
class Population {
 public:
  // Throws Parameter if N < 2, any x_i is not a finite positive number,
  // y has the wrong row count or no columns, or any y is non-finite.
  Population(std::vector<double> x, Matrix y);

  std::size_t size() const noexcept { return x_.size(); }
  std::size_t dims() const noexcept { return y_.cols(); }
  const std::vector<double>& x() const noexcept { return x_; }
  const Matrix& y() const noexcept { return y_; }

  double x_total() const noexcept { return x_total_; }
  double x_bar() const noexcept { return x_total_ / static_cast<double>(size()); }

 private:
  std::vector<double> x_;
  Matrix y_;
  double x_total_ = 0.0;
};

/// Linear superpopulation y_j = alpha_j + beta_j * x + eps_j with x ~ Gamma
/// (parameterized by mean and s.d.) and eps_j ~ Normal(0, sigma_j^2).
struct LinearModelSpec {
  std::vector<double> alpha{500.0};
  std::vector<double> beta{1.0};
  std::vector<double> sigma_eps{100.0};
  double gamma_mean = 1000.0;
  double gamma_sd = 200.0;

  static LinearModelSpec univariate_default();
  static LinearModelSpec bivariate_default();
};

// Throws Parameter for inconsistent lengths, sigma < 0, or non-positive
// gamma moments. sigma == 0 is accepted and yields exact linear data.
Population generate(const LinearModelSpec& spec, std::size_t n_pop,
                    std::uint64_t seed);

Population generate_univariate(const LinearModelSpec& spec, std::size_t n_pop,
                               std::uint64_t seed);
Population generate_bivariate(const LinearModelSpec& spec, std::size_t n_pop,
                              std::uint64_t seed);

// Comma-delimited, header row first. Errors name the data row (1-based,
// header excluded) and the column.
Population load_csv(const std::filesystem::path& path,
                    const std::string& x_column,
                    const std::vector<std::string>& y_columns);

void save_csv(const Population& pop, const std::filesystem::path& path,
              const std::string& x_column,
              const std::vector<std::string>& y_columns);

}  // namespace svy

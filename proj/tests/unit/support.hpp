#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "error.hpp"
#include "population.hpp"

namespace testutil {

inline svy::Population pop1(std::vector<double> x, std::vector<double> y) {
  const auto n = y.size();
  return svy::Population(std::move(x), svy::Matrix(n, 1, std::move(y)));
}

inline svy::Population pop2(std::vector<double> x, std::vector<double> z1,
                            std::vector<double> z2) {
  const auto n = z1.size();
  svy::Matrix y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    y(i, 0) = z1[i];
    y(i, 1) = z2[i];
  }
  return svy::Population(std::move(x), std::move(y));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("svy_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <class F>
svy::ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const svy::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an svy::Error");
}

}  // namespace testutil

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "designs.hpp"
#include "estimators.hpp"
#include "functionals.hpp"
#include "population.hpp"

namespace svy {

// Either a synthetic linear model or a CSV file.
struct PopulationSource {
  std::string model;  // "univariate", "bivariate" or empty for CSV
  LinearModelSpec spec;
  std::size_t n_pop = 5000;
  std::uint64_t seed = 1;

  std::filesystem::path csv;
  std::string x_column = "x";
  std::vector<std::string> y_columns;
};

struct Cell {
  std::string label;
  DesignKind design = DesignKind::Srswor;
  EstimatorKind estimator = EstimatorKind::Ht;
  Functional functional;
};

struct ExperimentConfig {
  PopulationSource population;
  std::vector<Cell> cells;
  std::vector<std::size_t> sample_sizes{75, 100, 125};
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  bool jackknife = false;
  bool ci = true;
  double ci_level = 0.95;
  // RE(first | second) = MSE(second) / MSE(first), by cell label.
  std::vector<std::pair<std::string, std::string>> re_pairs;
};

// Parses the JSON config text; relative CSV paths resolve against base_dir.
// Config errors name the offending field.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Checks cell validity against the design/estimator table and n < N.
void validate_config(const ExperimentConfig& cfg, const Population& pop);

Population materialize(const PopulationSource& source);

struct CellResult {
  std::size_t cell = 0;
  std::size_t n = 0;
  double truth = 0.0;
  std::size_t evaluated = 0;
  std::size_t failures = 0;
  bool flagged = false;  // failure rate above 50%
  double mean_estimate = 0.0;
  double mse = 0.0;

  bool jackknife = false;
  std::size_t bc_evaluated = 0;
  std::size_t bc_failures = 0;
  double bc_mse = 0.0;

  bool has_ci = false;
  std::size_t ci_evaluated = 0;
  std::size_t ci_failures = 0;
  double ci_mean_length = 0.0;
  double ci_sd_length = 0.0;
  double coverage = 0.0;
};

struct ReResult {
  std::string numerator;
  std::string denominator;
  std::size_t n = 0;
  std::optional<double> re;  // empty when the numerator MSE is 0 or missing
};

struct ExperimentReport {
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  double ci_level = 0.95;
  std::vector<Cell> cells;
  std::vector<double> truths;  // per cell
  std::vector<CellResult> results;  // cell-major, then sample size
  std::vector<ReResult> relative_efficiencies;

  const CellResult& result(const std::string& label, std::size_t n) const;
};

double empirical_mse(const std::vector<double>& estimates, double truth);

// MSE of the second cell over MSE of the first. UndefinedRatio when the
// first MSE is not positive.
double relative_efficiency(double mse_first, double mse_second);

// Replicate l of design D at size n draws from the substream keyed on
// (seed, n, D, l), so the report does not depend on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Population& pop,
                                unsigned threads = 1);
ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

void write_mse_csv(const ExperimentReport& r, std::ostream& out);
void write_re_csv(const ExperimentReport& r, std::ostream& out);
void write_ci_csv(const ExperimentReport& r, std::ostream& out);
void write_summary(const ExperimentReport& r, std::ostream& out);

// Writes mse.csv, re.csv and ci.csv into dir.
void write_report(const ExperimentReport& r, const std::filesystem::path& dir);

}  // namespace svy

#include "population.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace svy {

Population::Population(std::vector<double> x, Matrix y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2) fail(ErrorCode::Parameter, "population needs N >= 2");
  if (y_.rows() != x_.size())
    fail(ErrorCode::Parameter, "y must have exactly N rows");
  if (y_.cols() == 0) fail(ErrorCode::Parameter, "y must have d >= 1 columns");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || x_[i] <= 0.0)
      fail(ErrorCode::Parameter,
           "x must be finite and positive (unit " + std::to_string(i + 1) + ")");
    x_total_ += x_[i];
  }
  for (double v : y_.data())
    if (!std::isfinite(v)) fail(ErrorCode::Parameter, "y must be finite");
}

LinearModelSpec LinearModelSpec::univariate_default() { return {}; }

LinearModelSpec LinearModelSpec::bivariate_default() {
  LinearModelSpec spec;
  spec.alpha = {500.0, 1000.0};
  spec.beta = {1.0, 1.0};
  spec.sigma_eps = {100.0, 200.0};
  return spec;
}

Population generate(const LinearModelSpec& spec, std::size_t n_pop,
                    std::uint64_t seed) {
  const std::size_t d = spec.alpha.size();
  if (d == 0 || spec.beta.size() != d || spec.sigma_eps.size() != d)
    fail(ErrorCode::Parameter,
         "alpha, beta and sigma must have the same positive length");
  if (n_pop < 2) fail(ErrorCode::Parameter, "n_pop must be >= 2");
  if (!(spec.gamma_mean > 0.0) || !(spec.gamma_sd > 0.0) ||
      !std::isfinite(spec.gamma_mean) || !std::isfinite(spec.gamma_sd))
    fail(ErrorCode::Parameter, "gamma mean and s.d. must be positive");
  for (double s : spec.sigma_eps)
    if (!(s >= 0.0) || !std::isfinite(s))
      fail(ErrorCode::Parameter, "sigma must be finite and >= 0");

  const double shape = spec.gamma_mean * spec.gamma_mean /
                       (spec.gamma_sd * spec.gamma_sd);
  const double scale = spec.gamma_sd * spec.gamma_sd / spec.gamma_mean;

  // x and every noise coordinate get their own stream, so the x column for a
  // given seed does not depend on d.
  std::vector<double> x(n_pop);
  {
    Rng rng = Rng::substream(seed, {0});
    std::gamma_distribution<double> gamma(shape, scale);
    for (auto& xi : x) {
      do {
        xi = gamma(rng);
      } while (!(xi > 0.0));
    }
  }
  Matrix y(n_pop, d);
  for (std::size_t j = 0; j < d; ++j) {
    Rng rng = Rng::substream(seed, {1, j});
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n_pop; ++i) {
      const double eps = spec.sigma_eps[j] > 0.0 ? spec.sigma_eps[j] * noise(rng) : 0.0;
      y(i, j) = spec.alpha[j] + spec.beta[j] * x[i] + eps;
    }
  }
  return Population(std::move(x), std::move(y));
}

Population generate_univariate(const LinearModelSpec& spec, std::size_t n_pop,
                               std::uint64_t seed) {
  if (spec.alpha.size() != 1)
    fail(ErrorCode::Parameter, "univariate model needs one alpha/beta/sigma");
  return generate(spec, n_pop, seed);
}

Population generate_bivariate(const LinearModelSpec& spec, std::size_t n_pop,
                              std::uint64_t seed) {
  if (spec.alpha.size() != 2)
    fail(ErrorCode::Parameter, "bivariate model needs two alpha/beta/sigma");
  return generate(spec, n_pop, seed);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(std::size_t row, const std::string& column) {
  return "row " + std::to_string(row) + ", column '" + column + "'";
}

double parse_cell(const std::string& cell, std::size_t row,
                  const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    fail(ErrorCode::Ingestion,
         "non-numeric cell '" + cell + "' at " + where(row, column));
  return value;
}

}  // namespace

Population load_csv(const std::filesystem::path& path,
                    const std::string& x_column,
                    const std::vector<std::string>& y_columns) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  if (y_columns.empty())
    fail(ErrorCode::Ingestion, "at least one y column is required");

  std::string line;
  if (!std::getline(in, line))
    fail(ErrorCode::Ingestion, path.string() + " has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_row(line);

  auto locate = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    fail(ErrorCode::Ingestion, "missing column '" + name + "' in " + path.string());
  };
  const std::size_t x_idx = locate(x_column);
  std::vector<std::size_t> y_idx;
  for (const auto& name : y_columns) y_idx.push_back(locate(name));

  std::vector<double> x;
  std::vector<double> y;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      fail(ErrorCode::Ingestion, "row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) +
                                     " cells, header has " +
                                     std::to_string(header.size()));
    const double xv = parse_cell(cells[x_idx], row, x_column);
    if (!(xv > 0.0))
      fail(ErrorCode::Ingestion, "non-positive x at " + where(row, x_column));
    x.push_back(xv);
    for (std::size_t j = 0; j < y_idx.size(); ++j)
      y.push_back(parse_cell(cells[y_idx[j]], row, y_columns[j]));
  }
  if (x.size() < 2)
    fail(ErrorCode::Ingestion, path.string() + " must contain at least 2 rows");
  const std::size_t n = x.size();
  return Population(std::move(x), Matrix(n, y_columns.size(), std::move(y)));
}

void save_csv(const Population& pop, const std::filesystem::path& path,
              const std::string& x_column,
              const std::vector<std::string>& y_columns) {
  if (y_columns.size() != pop.dims())
    fail(ErrorCode::Parameter, "need one column name per y coordinate");
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << x_column;
  for (const auto& name : y_columns) out << ',' << name;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  for (std::size_t i = 0; i < pop.size(); ++i) {
    put(pop.x()[i]);
    for (std::size_t j = 0; j < pop.dims(); ++j) {
      out << ',';
      put(pop.y()(i, j));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace svy

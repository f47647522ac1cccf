#include "functionals.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "error.hpp"

namespace svy {

std::size_t Functional::d() const noexcept {
  switch (kind) {
    case FunctionalKind::Mean:
    case FunctionalKind::Variance: return 1;
    case FunctionalKind::Correlation:
    case FunctionalKind::RegressionCoef: return 2;
  }
  return 0;
}

std::size_t Functional::p() const noexcept {
  switch (kind) {
    case FunctionalKind::Mean: return 1;
    case FunctionalKind::Variance: return 2;
    case FunctionalKind::Correlation: return 5;
    case FunctionalKind::RegressionCoef: return 4;
  }
  return 0;
}

std::string Functional::name() const {
  auto col = [&](std::size_t k) {
    return k < columns.size() ? std::to_string(columns[k]) : std::string("?");
  };
  switch (kind) {
    case FunctionalKind::Mean: return "mean:" + col(0);
    case FunctionalKind::Variance: return "variance:" + col(0);
    case FunctionalKind::Correlation: return "correlation:" + col(0) + "," + col(1);
    case FunctionalKind::RegressionCoef: return "regression:" + col(0) + "," + col(1);
  }
  return "?";
}

std::optional<Functional> parse_functional(std::string_view text) {
  const auto colon = text.find(':');
  std::string head(text.substr(0, colon));
  for (auto& c : head) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  Functional f;
  if (head == "mean") f = Functional::mean();
  else if (head == "variance" || head == "var") f = Functional::variance();
  else if (head == "correlation" || head == "corr") f = Functional::correlation();
  else if (head == "regression" || head == "reg" || head == "regcoef")
    f = Functional::regression();
  else return std::nullopt;

  if (colon == std::string_view::npos) return f;
  std::vector<std::size_t> cols;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    const auto tok = rest.substr(0, comma);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      return std::nullopt;
    cols.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (cols.size() != f.d()) return std::nullopt;
  f.columns = cols;
  return f;
}

Matrix h_transform(const Functional& f, const Matrix& rows) {
  if (rows.cols() != f.d())
    fail(ErrorCode::Parameter, f.name() + " expects rows of dimension " +
                                   std::to_string(f.d()) + ", got " +
                                   std::to_string(rows.cols()));
  Matrix h(rows.rows(), f.p());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto out = h.row(i);
    switch (f.kind) {
      case FunctionalKind::Mean:
        out[0] = rows(i, 0);
        break;
      case FunctionalKind::Variance: {
        const double y = rows(i, 0);
        out[0] = y * y;
        out[1] = y;
        break;
      }
      case FunctionalKind::Correlation: {
        const double a = rows(i, 0), b = rows(i, 1);
        out[0] = a;
        out[1] = b;
        out[2] = a * a;
        out[3] = b * b;
        out[4] = a * b;
        break;
      }
      case FunctionalKind::RegressionCoef: {
        const double a = rows(i, 0), b = rows(i, 1);
        out[0] = a;
        out[1] = b;
        out[2] = b * b;
        out[3] = a * b;
        break;
      }
    }
  }
  return h;
}

Matrix select_study(const Functional& f, const Population& pop,
                    std::span<const std::size_t> units) {
  if (f.columns.size() != f.d())
    fail(ErrorCode::Parameter, f.name() + " needs " + std::to_string(f.d()) + " column(s)");
  for (auto c : f.columns)
    if (c >= pop.dims())
      fail(ErrorCode::Parameter, f.name() + " refers to column " + std::to_string(c) +
                                     " but the population has " +
                                     std::to_string(pop.dims()));
  const std::size_t rows = units.empty() ? pop.size() : units.size();
  Matrix out(rows, f.d());
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t unit = units.empty() ? r : units[r];
    for (std::size_t j = 0; j < f.d(); ++j) out(r, j) = pop.y()(unit, f.columns[j]);
  }
  return out;
}

Matrix sample_h(const Functional& f, const Population& pop, const SampleDraw& sample) {
  return h_transform(f, select_study(f, pop, sample.indices));
}

namespace {

void check_arity(const Functional& f, std::span<const double> s) {
  if (s.size() != f.p())
    fail(ErrorCode::Parameter, f.name() + " expects an argument of length " +
                                   std::to_string(f.p()));
}

}  // namespace

double g_eval(const Functional& f, std::span<const double> s) {
  check_arity(f, s);
  switch (f.kind) {
    case FunctionalKind::Mean:
      return s[0];
    case FunctionalKind::Variance:
      return s[0] - s[1] * s[1];
    case FunctionalKind::Correlation: {
      const double va = s[2] - s[0] * s[0];
      const double vb = s[3] - s[1] * s[1];
      if (!(va > 0.0) || !(vb > 0.0))
        fail(ErrorCode::UndefinedParameter, "correlation undefined: non-positive variance");
      return (s[4] - s[0] * s[1]) / std::sqrt(va * vb);
    }
    case FunctionalKind::RegressionCoef: {
      const double v = s[2] - s[1] * s[1];
      if (!(v > 0.0))
        fail(ErrorCode::UndefinedParameter,
             "regression coefficient undefined: non-positive regressor variance");
      return (s[3] - s[0] * s[1]) / v;
    }
  }
  fail(ErrorCode::Parameter, "unknown functional");
}

std::vector<double> g_grad(const Functional& f, std::span<const double> s) {
  check_arity(f, s);
  switch (f.kind) {
    case FunctionalKind::Mean:
      return {1.0};
    case FunctionalKind::Variance:
      return {1.0, -2.0 * s[1]};
    case FunctionalKind::Correlation: {
      const double va = s[2] - s[0] * s[0];
      const double vb = s[3] - s[1] * s[1];
      if (!(va > 0.0) || !(vb > 0.0))
        fail(ErrorCode::UndefinedParameter, "correlation undefined: non-positive variance");
      const double root = std::sqrt(va * vb);
      const double r = (s[4] - s[0] * s[1]) / root;
      return {-s[1] / root + r * s[0] / va, -s[0] / root + r * s[1] / vb,
              -0.5 * r / va, -0.5 * r / vb, 1.0 / root};
    }
    case FunctionalKind::RegressionCoef: {
      const double v = s[2] - s[1] * s[1];
      if (!(v > 0.0))
        fail(ErrorCode::UndefinedParameter,
             "regression coefficient undefined: non-positive regressor variance");
      const double b = (s[3] - s[0] * s[1]) / v;
      return {-s[1] / v, (-s[0] + 2.0 * b * s[1]) / v, -b / v, 1.0 / v};
    }
  }
  fail(ErrorCode::Parameter, "unknown functional");
}

std::vector<double> population_h_mean(const Functional& f, const Population& pop) {
  const Matrix h = h_transform(f, select_study(f, pop));
  std::vector<double> mean(h.cols(), 0.0);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) mean[j] += h(i, j);
  for (auto& m : mean) m /= static_cast<double>(h.rows());
  return mean;
}

double population_value(const Functional& f, const Population& pop) {
  return g_eval(f, population_h_mean(f, pop));
}

void require_plug_in_kind(const Functional& f, EstimatorKind kind) {
  if ((f.kind == FunctionalKind::Correlation || f.kind == FunctionalKind::RegressionCoef) &&
      kind != EstimatorKind::Hajek && kind != EstimatorKind::Peml)
    fail(ErrorCode::Combination, f.name() + " is only estimated by Hajek or PEML plug-ins");
}

double plug_in(const Functional& f, EstimatorKind kind, const SampleDraw& sample,
               const Population& pop) {
  require_plug_in_kind(f, kind);
  return g_eval(f, estimate_mean(kind, sample, pop, sample_h(f, pop, sample)));
}

}  // namespace svy

#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "error.hpp"
#include "inference.hpp"
#include "rng.hpp"

namespace svy {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& msg) {
  fail(ErrorCode::Config, "config field '" + field + "': " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) config_error(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) config_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) config_error(field, "expected a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    config_error(field, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) config_error(field, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& field) {
  if (!v.is_boolean()) config_error(field, "expected true or false");
  return v.get<bool>();
}

std::vector<double> get_numbers(const json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) config_error(field, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

void check_known_keys(const json& obj, const std::string& path,
                      std::initializer_list<const char*> keys) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      config_error(join(path, key), "unknown field");
  }
}

PopulationSource parse_population(const json& j, const std::filesystem::path& base) {
  const std::string path = "population";
  if (!j.is_object()) config_error(path, "expected an object");
  check_known_keys(j, path, {"model", "n_pop", "seed", "alpha", "beta", "sigma",
                             "gamma_mean", "gamma_sd", "csv", "x_column", "y_columns"});
  PopulationSource src;
  if (j.contains("csv")) {
    src.csv = get_string(j["csv"], path + ".csv");
    if (src.csv.is_relative() && !base.empty()) src.csv = base / src.csv;
    if (j.contains("x_column")) src.x_column = get_string(j["x_column"], path + ".x_column");
    const auto& ys = require(j, "y_columns", path);
    if (!ys.is_array() || ys.empty())
      config_error(path + ".y_columns", "expected a non-empty array of names");
    for (std::size_t i = 0; i < ys.size(); ++i)
      src.y_columns.push_back(get_string(ys[i], path + ".y_columns[" + std::to_string(i) + "]"));
    return src;
  }
  src.model = get_string(require(j, "model", path), path + ".model");
  if (src.model == "univariate") src.spec = LinearModelSpec::univariate_default();
  else if (src.model == "bivariate") src.spec = LinearModelSpec::bivariate_default();
  else config_error(path + ".model", "expected 'univariate' or 'bivariate'");
  if (j.contains("n_pop")) src.n_pop = get_count(j["n_pop"], path + ".n_pop");
  if (j.contains("seed")) src.seed = get_count(j["seed"], path + ".seed");
  if (j.contains("alpha")) src.spec.alpha = get_numbers(j["alpha"], path + ".alpha");
  if (j.contains("beta")) src.spec.beta = get_numbers(j["beta"], path + ".beta");
  if (j.contains("sigma")) src.spec.sigma_eps = get_numbers(j["sigma"], path + ".sigma");
  if (j.contains("gamma_mean"))
    src.spec.gamma_mean = get_number(j["gamma_mean"], path + ".gamma_mean");
  if (j.contains("gamma_sd")) src.spec.gamma_sd = get_number(j["gamma_sd"], path + ".gamma_sd");
  const std::size_t d = src.model == "univariate" ? 1 : 2;
  if (src.spec.alpha.size() != d) config_error(path + ".alpha", "wrong length for model");
  if (src.spec.beta.size() != d) config_error(path + ".beta", "wrong length for model");
  if (src.spec.sigma_eps.size() != d) config_error(path + ".sigma", "wrong length for model");
  return src;
}

Cell parse_cell(const json& j, std::size_t idx) {
  const std::string path = "cells[" + std::to_string(idx) + "]";
  if (!j.is_object()) config_error(path, "expected an object");
  check_known_keys(j, path, {"label", "design", "estimator", "functional"});
  Cell c;
  const auto design = get_string(require(j, "design", path), path + ".design");
  const auto est = get_string(require(j, "estimator", path), path + ".estimator");
  const auto fd = parse_design(design);
  if (!fd) config_error(path + ".design", "unknown design '" + design + "'");
  const auto fe = parse_estimator(est);
  if (!fe) config_error(path + ".estimator", "unknown estimator '" + est + "'");
  c.design = *fd;
  c.estimator = *fe;
  const std::string fname =
      j.contains("functional") ? get_string(j["functional"], path + ".functional") : "mean";
  const auto ff = parse_functional(fname);
  if (!ff) config_error(path + ".functional", "unknown functional '" + fname + "'");
  c.functional = *ff;
  if (!is_valid_combination(c.estimator, c.design))
    config_error(path, std::string(to_string(c.estimator)) + " is not defined under " +
                           std::string(to_string(c.design)));
  c.label = j.contains("label")
                ? get_string(j["label"], path + ".label")
                : std::string(to_string(c.estimator)) + "-" +
                      std::string(to_string(c.design)) + "-" + c.functional.name();
  return c;
}

std::string fmt_full(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
}

struct Outcome {
  std::optional<double> estimate;
  std::optional<double> bc;
  std::optional<double> ci_length;
  bool covered = false;
};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) config_error("<root>", "expected a JSON object");
  check_known_keys(root, "", {"population", "cells", "sample_sizes", "replicates", "seed",
                              "jackknife", "ci", "ci_level", "relative_efficiency"});
  ExperimentConfig cfg;
  cfg.population = parse_population(require(root, "population", ""), base_dir);

  const auto& cells = require(root, "cells", "");
  if (!cells.is_array() || cells.empty()) config_error("cells", "expected a non-empty array");
  for (std::size_t i = 0; i < cells.size(); ++i) cfg.cells.push_back(parse_cell(cells[i], i));
  for (std::size_t i = 0; i < cfg.cells.size(); ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (cfg.cells[i].label == cfg.cells[k].label)
        config_error("cells[" + std::to_string(i) + "].label",
                     "duplicate label '" + cfg.cells[i].label + "'");

  if (root.contains("sample_sizes")) {
    const auto& ss = root["sample_sizes"];
    if (!ss.is_array() || ss.empty())
      config_error("sample_sizes", "expected a non-empty array of counts");
    cfg.sample_sizes.clear();
    for (std::size_t i = 0; i < ss.size(); ++i)
      cfg.sample_sizes.push_back(get_count(ss[i], "sample_sizes[" + std::to_string(i) + "]"));
  }
  if (root.contains("replicates")) cfg.replicates = get_count(root["replicates"], "replicates");
  if (cfg.replicates < 1) config_error("replicates", "must be >= 1");
  if (root.contains("seed")) cfg.seed = get_count(root["seed"], "seed");
  if (root.contains("jackknife")) cfg.jackknife = get_bool(root["jackknife"], "jackknife");
  if (root.contains("ci")) cfg.ci = get_bool(root["ci"], "ci");
  if (root.contains("ci_level")) {
    cfg.ci_level = get_number(root["ci_level"], "ci_level");
    if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) config_error("ci_level", "must lie in (0, 1)");
  }
  if (root.contains("relative_efficiency")) {
    const auto& pairs = root["relative_efficiency"];
    if (!pairs.is_array()) config_error("relative_efficiency", "expected an array of pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string field = "relative_efficiency[" + std::to_string(i) + "]";
      const auto& p = pairs[i];
      if (!p.is_array() || p.size() != 2) config_error(field, "expected [numerator, denominator]");
      std::pair<std::string, std::string> pr{get_string(p[0], field + "[0]"),
                                             get_string(p[1], field + "[1]")};
      for (const auto* lbl : {&pr.first, &pr.second})
        if (std::none_of(cfg.cells.begin(), cfg.cells.end(),
                         [&](const Cell& c) { return c.label == *lbl; }))
          config_error(field, "unknown cell label '" + *lbl + "'");
      cfg.re_pairs.push_back(std::move(pr));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Population materialize(const PopulationSource& source) {
  if (!source.csv.empty()) return load_csv(source.csv, source.x_column, source.y_columns);
  return generate(source.spec, source.n_pop, source.seed);
}

void validate_config(const ExperimentConfig& cfg, const Population& pop) {
  for (std::size_t i = 0; i < cfg.cells.size(); ++i) {
    const auto& c = cfg.cells[i];
    const std::string field = "cells[" + std::to_string(i) + "]";
    if (!is_valid_combination(c.estimator, c.design))
      config_error(field, "invalid estimator/design pair");
    if (c.functional.kind == FunctionalKind::Correlation ||
        c.functional.kind == FunctionalKind::RegressionCoef) {
      if (c.estimator != EstimatorKind::Hajek && c.estimator != EstimatorKind::Peml)
        config_error(field + ".estimator", c.functional.name() +
                                               " is only estimated by Hajek or PEML");
    }
    for (auto col : c.functional.columns)
      if (col >= pop.dims())
        config_error(field + ".functional", "column " + std::to_string(col) +
                                                " is out of range for a population with " +
                                                std::to_string(pop.dims()) + " study column(s)");
  }
  for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
    const auto n = cfg.sample_sizes[i];
    if (n < 2 || n >= pop.size())
      config_error("sample_sizes[" + std::to_string(i) + "]", "must satisfy 2 <= n < N");
    if (cfg.jackknife && n < 3)
      config_error("sample_sizes[" + std::to_string(i) + "]", "jackknife needs n >= 3");
  }
}

const CellResult& ExperimentReport::result(const std::string& label, std::size_t n) const {
  for (const auto& r : results)
    if (cells[r.cell].label == label && r.n == n) return r;
  fail(ErrorCode::Parameter, "no result for cell '" + label + "' at n=" + std::to_string(n));
}

double empirical_mse(const std::vector<double>& estimates, double truth) {
  if (estimates.empty()) fail(ErrorCode::Parameter, "empirical MSE of an empty list");
  double acc = 0.0;
  for (double e : estimates) acc += (e - truth) * (e - truth);
  return acc / static_cast<double>(estimates.size());
}

double relative_efficiency(double mse_first, double mse_second) {
  if (!(mse_first > 0.0))
    fail(ErrorCode::UndefinedRatio, "relative efficiency undefined: reference MSE is 0");
  return mse_second / mse_first;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Population& pop,
                                unsigned threads) {
  validate_config(cfg, pop);
  ExperimentReport report;
  report.seed = cfg.seed;
  report.replicates = cfg.replicates;
  report.ci_level = cfg.ci_level;
  report.cells = cfg.cells;
  for (const auto& c : cfg.cells) report.truths.push_back(population_value(c.functional, pop));

  // results[cell][size index]
  std::vector<std::vector<CellResult>> table(cfg.cells.size(),
                                             std::vector<CellResult>(cfg.sample_sizes.size()));
  const std::size_t I = cfg.replicates;

  for (std::size_t si = 0; si < cfg.sample_sizes.size(); ++si) {
    const std::size_t n = cfg.sample_sizes[si];
    for (DesignKind design : {DesignKind::Srswor, DesignKind::Lms, DesignKind::RaoSampford,
                              DesignKind::Rhc}) {
      std::vector<std::size_t> members;
      for (std::size_t c = 0; c < cfg.cells.size(); ++c)
        if (cfg.cells[c].design == design) members.push_back(c);
      if (members.empty()) continue;

      const Sampler sampler(design, pop, n);
      std::vector<std::vector<Outcome>> outcomes(members.size(), std::vector<Outcome>(I));

      parallel_for(I, threads, [&](std::size_t rep) {
        Rng rng = Rng::substream(cfg.seed, {static_cast<std::uint64_t>(n),
                                            static_cast<std::uint64_t>(design), rep});
        std::optional<SampleDraw> sample;
        try {
          sample = sampler.draw(rng);
        } catch (const Error&) {
          return;  // every cell records a failure for this replicate
        }
        for (std::size_t m = 0; m < members.size(); ++m) {
          const Cell& cell = cfg.cells[members[m]];
          const double truth = report.truths[members[m]];
          Outcome& out = outcomes[m][rep];
          try {
            out.estimate = plug_in(cell.functional, cell.estimator, *sample, pop);
          } catch (const Error&) {
            continue;
          }
          if (cfg.jackknife) {
            try {
              out.bc = jackknife_bc(*sample, pop, cell.functional, cell.estimator);
            } catch (const Error&) {
            }
          }
          if (cfg.ci && has_variance_estimator(cell.estimator, design)) {
            try {
              const double v = variance_est(*sample, pop, cell.functional, cell.estimator);
              const auto ci = confidence_interval(*out.estimate, std::max(v, 0.0), n,
                                                  cfg.ci_level);
              out.ci_length = ci.length();
              out.covered = ci.contains(truth);
            } catch (const Error&) {
            }
          }
        }
      });

      for (std::size_t m = 0; m < members.size(); ++m) {
        CellResult& r = table[members[m]][si];
        const Cell& cell = cfg.cells[members[m]];
        r.cell = members[m];
        r.n = n;
        r.truth = report.truths[members[m]];
        r.jackknife = cfg.jackknife;
        r.has_ci = cfg.ci && has_variance_estimator(cell.estimator, design);
        std::vector<double> est, bc, len;
        std::size_t covered = 0;
        for (const auto& o : outcomes[m]) {
          if (o.estimate) est.push_back(*o.estimate);
          if (o.estimate && o.bc) bc.push_back(*o.bc);
          if (o.ci_length) {
            len.push_back(*o.ci_length);
            covered += o.covered ? 1 : 0;
          }
        }
        r.evaluated = est.size();
        r.failures = I - est.size();
        r.flagged = 2 * r.failures > I;
        if (!est.empty()) {
          r.mse = empirical_mse(est, r.truth);
          double s = 0.0;
          for (double e : est) s += e;
          r.mean_estimate = s / static_cast<double>(est.size());
        } else {
          r.mse = std::numeric_limits<double>::quiet_NaN();
          r.mean_estimate = std::numeric_limits<double>::quiet_NaN();
        }
        if (cfg.jackknife) {
          r.bc_evaluated = bc.size();
          r.bc_failures = I - bc.size();
          r.bc_mse = bc.empty() ? std::numeric_limits<double>::quiet_NaN()
                                : empirical_mse(bc, r.truth);
        }
        if (r.has_ci) {
          r.ci_evaluated = len.size();
          r.ci_failures = I - len.size();
          if (!len.empty()) {
            double s = 0.0;
            for (double l : len) s += l;
            r.ci_mean_length = s / static_cast<double>(len.size());
            double ss = 0.0;
            for (double l : len) ss += (l - r.ci_mean_length) * (l - r.ci_mean_length);
            r.ci_sd_length =
                len.size() > 1 ? std::sqrt(ss / static_cast<double>(len.size() - 1)) : 0.0;
            r.coverage = static_cast<double>(covered) / static_cast<double>(len.size());
          } else {
            r.ci_mean_length = r.ci_sd_length = r.coverage =
                std::numeric_limits<double>::quiet_NaN();
          }
        }
      }
    }
  }

  for (auto& row : table)
    for (auto& r : row) report.results.push_back(r);

  for (std::size_t n : cfg.sample_sizes) {
    for (const auto& [a, b] : cfg.re_pairs) {
      ReResult rr{a, b, n, std::nullopt};
      const auto& ra = report.result(a, n);
      const auto& rb = report.result(b, n);
      if (ra.evaluated > 0 && rb.evaluated > 0 && ra.mse > 0.0)
        rr.re = relative_efficiency(ra.mse, rb.mse);
      report.relative_efficiencies.push_back(rr);
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  return run_experiment(cfg, materialize(cfg.population), threads);
}

void write_mse_csv(const ExperimentReport& r, std::ostream& out) {
  out << "cell,design,estimator,functional,n,replicates,evaluated,failures,flagged,truth,"
         "mean_estimate,mse";
  const bool jk = !r.results.empty() && r.results.front().jackknife;
  if (jk) out << ",bc_evaluated,bc_failures,bc_mse";
  out << '\n';
  for (const auto& res : r.results) {
    const auto& c = r.cells[res.cell];
    out << csv_quote(c.label) << ',' << to_string(c.design) << ',' << to_string(c.estimator)
        << ',' << csv_quote(c.functional.name()) << ',' << res.n << ',' << r.replicates << ','
        << res.evaluated << ',' << res.failures << ',' << (res.flagged ? 1 : 0) << ','
        << fmt_full(res.truth) << ',' << fmt_full(res.mean_estimate) << ','
        << fmt_full(res.mse);
    if (jk)
      out << ',' << res.bc_evaluated << ',' << res.bc_failures << ',' << fmt_full(res.bc_mse);
    out << '\n';
  }
}

void write_re_csv(const ExperimentReport& r, std::ostream& out) {
  out << "numerator,denominator,n,re\n";
  for (const auto& re : r.relative_efficiencies)
    out << csv_quote(re.numerator) << ',' << csv_quote(re.denominator) << ',' << re.n << ','
        << (re.re ? fmt_full(*re.re) : "NA") << '\n';
}

void write_ci_csv(const ExperimentReport& r, std::ostream& out) {
  out << "cell,design,estimator,functional,n,level,evaluated,failures,mean_length,sd_length,"
         "coverage\n";
  for (const auto& res : r.results) {
    if (!res.has_ci) continue;
    const auto& c = r.cells[res.cell];
    out << csv_quote(c.label) << ',' << to_string(c.design) << ',' << to_string(c.estimator)
        << ',' << csv_quote(c.functional.name()) << ',' << res.n << ','
        << fmt_full(r.ci_level) << ',' << res.ci_evaluated << ',' << res.ci_failures << ','
        << fmt_full(res.ci_mean_length) << ',' << fmt_full(res.ci_sd_length) << ','
        << fmt_full(res.coverage) << '\n';
  }
}

void write_summary(const ExperimentReport& r, std::ostream& out) {
  out << "replicates " << r.replicates << ", seed " << r.seed << "\n\n";
  out << "Empirical MSE\n";
  for (const auto& res : r.results) {
    const auto& c = r.cells[res.cell];
    out << "  " << c.label << "  n=" << res.n << "  truth=" << fmt6(res.truth)
        << "  mean=" << fmt6(res.mean_estimate) << "  mse=" << fmt6(res.mse);
    if (res.jackknife) out << "  bc_mse=" << fmt6(res.bc_mse);
    if (res.failures) out << "  failures=" << res.failures;
    if (res.flagged) out << "  [FLAGGED]";
    out << '\n';
  }
  if (!r.relative_efficiencies.empty()) {
    out << "\nRelative efficiency RE(a | b) = MSE(b) / MSE(a)\n";
    for (const auto& re : r.relative_efficiencies)
      out << "  RE(" << re.numerator << " | " << re.denominator << ")  n=" << re.n << "  "
          << (re.re ? fmt6(*re.re) : std::string("NA")) << '\n';
  }
  bool any_ci = false;
  for (const auto& res : r.results) any_ci = any_ci || res.has_ci;
  if (any_ci) {
    out << "\nConfidence intervals (level " << fmt6(r.ci_level) << ")\n";
    for (const auto& res : r.results) {
      if (!res.has_ci) continue;
      out << "  " << r.cells[res.cell].label << "  n=" << res.n
          << "  mean_length=" << fmt6(res.ci_mean_length)
          << "  sd_length=" << fmt6(res.ci_sd_length) << "  coverage=" << fmt6(res.coverage)
          << '\n';
    }
  }
}

void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("mse.csv");
    write_mse_csv(r, f);
  }
  {
    auto f = open("re.csv");
    write_re_csv(r, f);
  }
  {
    auto f = open("ci.csv");
    write_ci_csv(r, f);
  }
}

}  // namespace svy

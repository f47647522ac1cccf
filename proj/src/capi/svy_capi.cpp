#include "svy/svy.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "asymptotics.hpp"
#include "error.hpp"
#include "montecarlo.hpp"
#include "oracle.hpp"
#include "population.hpp"

struct svy_population {
  svy::Population pop;
};

struct svy_report {
  svy::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

svy_status map_code(svy::ErrorCode c) {
  using svy::ErrorCode;
  switch (c) {
    case ErrorCode::Parameter: return SVY_ERR_PARAMETER;
    case ErrorCode::Ingestion: return SVY_ERR_INGESTION;
    case ErrorCode::Infeasible: return SVY_ERR_INFEASIBLE;
    case ErrorCode::Unsupported: return SVY_ERR_UNSUPPORTED;
    case ErrorCode::DrawFailure: return SVY_ERR_DRAW_FAILURE;
    case ErrorCode::EnumerationTooLarge: return SVY_ERR_ENUMERATION_TOO_LARGE;
    case ErrorCode::Combination: return SVY_ERR_COMBINATION;
    case ErrorCode::Degenerate: return SVY_ERR_DEGENERATE;
    case ErrorCode::Convergence: return SVY_ERR_CONVERGENCE;
    case ErrorCode::UndefinedParameter: return SVY_ERR_UNDEFINED_PARAMETER;
    case ErrorCode::Singularity: return SVY_ERR_SINGULARITY;
    case ErrorCode::JackknifeFailure: return SVY_ERR_JACKKNIFE_FAILURE;
    case ErrorCode::UndefinedRatio: return SVY_ERR_UNDEFINED_RATIO;
    case ErrorCode::Config: return SVY_ERR_CONFIG;
    case ErrorCode::Io: return SVY_ERR_IO;
  }
  return SVY_ERR_INTERNAL;
}

svy_status set_error(svy_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs body, translating exceptions into a status and the thread's message.
template <class F>
svy_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SVY_OK;
  } catch (const svy::Error& e) {
    return set_error(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SVY_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SVY_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SVY_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* name) {
  if (!p) svy::fail(svy::ErrorCode::Parameter, std::string(name) + " is NULL");
}

std::vector<std::string> split_names(const char* list) {
  std::vector<std::string> out;
  std::string cur;
  for (const char* p = list; *p; ++p) {
    if (*p == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += *p;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    if (s.empty()) svy::fail(svy::ErrorCode::Parameter, "empty column name in '" +
                                                            std::string(list) + "'");
  }
  return out;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

svy::DesignKind design_of(const char* name) {
  need(name, "design");
  const auto d = svy::parse_design(name);
  if (!d) svy::fail(svy::ErrorCode::Parameter, std::string("unknown design '") + name + "'");
  return *d;
}

svy::EstimatorKind estimator_of(const char* name) {
  need(name, "estimator");
  const auto e = svy::parse_estimator(name);
  if (!e) svy::fail(svy::ErrorCode::Parameter, std::string("unknown estimator '") + name + "'");
  return *e;
}

svy::Functional functional_of(const char* name, const svy::Population& pop) {
  need(name, "functional");
  const auto f = svy::parse_functional(name);
  if (!f) svy::fail(svy::ErrorCode::Parameter, std::string("unknown functional '") + name + "'");
  for (auto c : f->columns)
    if (c >= pop.dims())
      svy::fail(svy::ErrorCode::Parameter,
                "functional '" + std::string(name) + "' uses column " + std::to_string(c) +
                    " but the population has " + std::to_string(pop.dims()));
  return *f;
}

}  // namespace

extern "C" {

const char* svy_last_error(void) { return g_last_error.c_str(); }

const char* svy_status_name(svy_status status) {
  switch (status) {
    case SVY_OK: return "ok";
    case SVY_ERR_PARAMETER: return "parameter";
    case SVY_ERR_INGESTION: return "ingestion";
    case SVY_ERR_INFEASIBLE: return "infeasible";
    case SVY_ERR_UNSUPPORTED: return "unsupported";
    case SVY_ERR_DRAW_FAILURE: return "draw-failure";
    case SVY_ERR_ENUMERATION_TOO_LARGE: return "enumeration-too-large";
    case SVY_ERR_COMBINATION: return "combination";
    case SVY_ERR_DEGENERATE: return "degenerate";
    case SVY_ERR_CONVERGENCE: return "convergence";
    case SVY_ERR_UNDEFINED_PARAMETER: return "undefined-parameter";
    case SVY_ERR_SINGULARITY: return "singularity";
    case SVY_ERR_JACKKNIFE_FAILURE: return "jackknife-failure";
    case SVY_ERR_UNDEFINED_RATIO: return "undefined-ratio";
    case SVY_ERR_CONFIG: return "config";
    case SVY_ERR_IO: return "io";
    case SVY_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

svy_status svy_population_generate(const char* model, size_t n_pop, uint64_t seed,
                                   const double* alpha, const double* beta,
                                   const double* sigma, double gamma_mean, double gamma_sd,
                                   svy_population** out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = nullptr;
    svy::LinearModelSpec spec;
    const std::string m = model;
    if (m == "univariate") spec = svy::LinearModelSpec::univariate_default();
    else if (m == "bivariate") spec = svy::LinearModelSpec::bivariate_default();
    else svy::fail(svy::ErrorCode::Parameter, "unknown model '" + m + "'");
    const std::size_t d = spec.alpha.size();
    if (alpha) spec.alpha.assign(alpha, alpha + d);
    if (beta) spec.beta.assign(beta, beta + d);
    if (sigma) spec.sigma_eps.assign(sigma, sigma + d);
    if (gamma_mean > 0) spec.gamma_mean = gamma_mean;
    if (gamma_sd > 0) spec.gamma_sd = gamma_sd;
    *out = new svy_population{svy::generate(spec, n_pop, seed)};
  });
}

svy_status svy_population_load_csv(const char* path, const char* x_column,
                                   const char* y_columns, svy_population** out) {
  return guarded([&] {
    need(path, "path");
    need(x_column, "x_column");
    need(y_columns, "y_columns");
    need(out, "out");
    *out = nullptr;
    *out = new svy_population{svy::load_csv(path, x_column, split_names(y_columns))};
  });
}

svy_status svy_population_save_csv(const svy_population* pop, const char* path,
                                   const char* x_column, const char* y_columns) {
  return guarded([&] {
    need(pop, "pop");
    need(path, "path");
    need(x_column, "x_column");
    need(y_columns, "y_columns");
    svy::save_csv(pop->pop, path, x_column, split_names(y_columns));
  });
}

void svy_population_free(svy_population* pop) { delete pop; }

size_t svy_population_size(const svy_population* pop) { return pop ? pop->pop.size() : 0; }

size_t svy_population_dims(const svy_population* pop) { return pop ? pop->pop.dims() : 0; }

svy_status svy_population_x(const svy_population* pop, double* buf, size_t len) {
  return guarded([&] {
    need(pop, "pop");
    need(buf, "buf");
    if (len < pop->pop.size()) svy::fail(svy::ErrorCode::Parameter, "buffer too small");
    std::copy(pop->pop.x().begin(), pop->pop.x().end(), buf);
  });
}

svy_status svy_population_y(const svy_population* pop, size_t col, double* buf, size_t len) {
  return guarded([&] {
    need(pop, "pop");
    need(buf, "buf");
    if (col >= pop->pop.dims()) svy::fail(svy::ErrorCode::Parameter, "column out of range");
    if (len < pop->pop.size()) svy::fail(svy::ErrorCode::Parameter, "buffer too small");
    for (std::size_t i = 0; i < pop->pop.size(); ++i) buf[i] = pop->pop.y()(i, col);
  });
}

svy_status svy_experiment_run_file(const char* config_path, unsigned threads,
                                   svy_report** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = nullptr;
    const auto cfg = svy::load_config(config_path);
    *out = new svy_report{svy::run_experiment(cfg, threads ? threads : 1)};
  });
}

svy_status svy_experiment_run_json(const char* json_text, const char* base_dir,
                                   unsigned threads, svy_report** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    const auto cfg = svy::parse_config(json_text, base_dir ? base_dir : "");
    *out = new svy_report{svy::run_experiment(cfg, threads ? threads : 1)};
  });
}

svy_status svy_report_write(const svy_report* report, const char* dir) {
  return guarded([&] {
    need(report, "report");
    need(dir, "dir");
    svy::write_report(report->report, dir);
  });
}

svy_status svy_report_summary(const svy_report* report, char** out) {
  return guarded([&] {
    need(report, "report");
    need(out, "out");
    *out = nullptr;
    std::ostringstream ss;
    svy::write_summary(report->report, ss);
    *out = dup_string(ss.str());
  });
}

svy_status svy_report_csv(const svy_report* report, const char* which, char** out) {
  return guarded([&] {
    need(report, "report");
    need(which, "which");
    need(out, "out");
    *out = nullptr;
    std::ostringstream ss;
    const std::string w = which;
    if (w == "mse") svy::write_mse_csv(report->report, ss);
    else if (w == "re") svy::write_re_csv(report->report, ss);
    else if (w == "ci") svy::write_ci_csv(report->report, ss);
    else svy::fail(svy::ErrorCode::Parameter, "unknown table '" + w + "'");
    *out = dup_string(ss.str());
  });
}

void svy_report_free(svy_report* report) { delete report; }

void svy_string_free(char* s) { std::free(s); }

svy_status svy_exact_moments(const svy_population* pop, const char* design,
                             const char* estimator, const char* functional, size_t n,
                             svy_exact_summary* out) {
  return guarded([&] {
    need(pop, "pop");
    need(out, "out");
    const auto d = design_of(design);
    const auto e = estimator_of(estimator);
    const auto f = functional_of(functional, pop->pop);
    const auto s = svy::exact_moments(d, pop->pop, n, e, f);
    *out = {s.expectation, s.truth, s.bias(), s.variance, s.mse, s.support_size};
  });
}

svy_status svy_asymptotics_compute(const svy_population* pop, const char* functional,
                                   size_t n, svy_asymptotics* out) {
  return guarded([&] {
    need(pop, "pop");
    need(out, "out");
    const auto f = functional_of(functional, pop->pop);
    const auto ctx = svy::make_context(pop->pop, f, n);
    svy_asymptotics a{};
    a.lambda = ctx.lambda;
    a.gamma = ctx.gamma;
    a.phi = ctx.phi;
    a.x_bar = ctx.x_bar;
    a.s2_x = ctx.s2_x;
    a.s2_w = ctx.s2_w;
    a.s_xw = ctx.s_xw;
    for (int j = 1; j <= 9; ++j) {
      try {
        a.delta_sq[j - 1] = svy::delta_sq(j, ctx);
        a.delta_ok[j - 1] = 1;
      } catch (const svy::Error&) {
        a.delta_sq[j - 1] = 0.0;
        a.delta_ok[j - 1] = 0;
      }
    }
    *out = a;
  });
}

svy_status svy_equivalence_class(const char* estimator, const char* design, int lambda_zero,
                                 int* out) {
  return guarded([&] {
    need(out, "out");
    *out = 0;
    *out = svy::equivalence_class(estimator_of(estimator), design_of(design), lambda_zero != 0);
  });
}

svy_status svy_gamma_coeff(size_t N, size_t n, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = svy::gamma_coeff(N, n);
  });
}

}  // extern "C"

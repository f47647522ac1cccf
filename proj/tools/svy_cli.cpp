// svy: generate populations, run Monte Carlo experiments, exact checks and
// asymptotic diagnostics. Links only the C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "svy/svy.h"

namespace {

// 1 for bad flags or config, 2 for anything that failed while computing.
int exit_code(svy_status s) {
  switch (s) {
    case SVY_OK: return 0;
    case SVY_ERR_PARAMETER:
    case SVY_ERR_CONFIG:
    case SVY_ERR_COMBINATION: return 1;
    default: return 2;
  }
}

int report(svy_status s, const char* what) {
  std::fprintf(stderr, "svy %s: %s error: %s\n", what, svy_status_name(s), svy_last_error());
  return exit_code(s);
}

struct PopArgs {
  std::string path;
  std::string x_column = "x";
  std::string y_columns;
};

void add_pop_flags(CLI::App* cmd, PopArgs& p) {
  cmd->add_option("--pop", p.path, "population CSV")->required();
  cmd->add_option("--x-column", p.x_column, "size variable column");
  cmd->add_option("--y-columns", p.y_columns,
                  "comma-separated study columns (default: every column except x)");
}

// Header of the CSV minus the x column, used when --y-columns is omitted.
std::string default_y_columns(const PopArgs& p) {
  std::FILE* f = std::fopen(p.path.c_str(), "r");
  if (!f) return "y";
  std::string line;
  for (int c = std::fgetc(f); c != EOF && c != '\n'; c = std::fgetc(f))
    if (c != '\r') line += static_cast<char>(c);
  std::fclose(f);
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  std::string out, cur;
  auto flush = [&] {
    const auto b = cur.find_first_not_of(" \t");
    const auto e = cur.find_last_not_of(" \t");
    const std::string name = b == std::string::npos ? "" : cur.substr(b, e - b + 1);
    if (!name.empty() && name != p.x_column) out += (out.empty() ? "" : ",") + name;
    cur.clear();
  };
  for (char ch : line) {
    if (ch == ',') flush();
    else cur += ch;
  }
  flush();
  return out.empty() ? "y" : out;
}

svy_status open_pop(const PopArgs& p, svy_population** pop) {
  const std::string ys = p.y_columns.empty() ? default_y_columns(p) : p.y_columns;
  return svy_population_load_csv(p.path.c_str(), p.x_column.c_str(), ys.c_str(), pop);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-based survey sampling: estimators, designs and Monte Carlo benchmarks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic population CSV");
  std::string model = "univariate";
  std::size_t n_pop = 5000;
  std::uint64_t seed = 1;
  std::string out_csv;
  std::vector<double> alpha, beta, sigma;
  double gamma_mean = 1000.0, gamma_sd = 200.0;
  gen->add_option("--model", model, "univariate or bivariate")
      ->check(CLI::IsMember({"univariate", "bivariate"}));
  gen->add_option("--n-pop", n_pop, "population size")->check(CLI::Range(2ul, 1ul << 40));
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out_csv, "output CSV")->required();
  gen->add_option("--alpha", alpha, "intercept per study column");
  gen->add_option("--beta", beta, "slope per study column");
  gen->add_option("--sigma", sigma, "noise s.d. per study column");
  gen->add_option("--gamma-mean", gamma_mean, "mean of x")->check(CLI::PositiveNumber);
  gen->add_option("--gamma-sd", gamma_sd, "s.d. of x")->check(CLI::PositiveNumber);

  // run
  auto* run = app.add_subcommand("run", "run a Monte Carlo experiment from a JSON config");
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 1;
  run->add_option("--config", config, "experiment config (JSON)")->required();
  run->add_option("--out-dir", out_dir, "directory for mse.csv, re.csv, ci.csv");
  run->add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));

  // exact
  auto* exact = app.add_subcommand("exact", "exact design moments by full enumeration");
  std::string design, estimator, functional = "mean";
  std::size_t n = 0;
  PopArgs exact_pop;
  exact->add_option("--design", design, "SRSWOR, LMS or RHC")->required();
  exact->add_option("--estimator", estimator, "HT, Hajek, Ratio, Product, RHC, GREG, PEML")
      ->required();
  exact->add_option("--functional", functional, "mean, variance, correlation:a,b, regression:a,b");
  exact->add_option("--n", n, "sample size")->required();
  add_pop_flags(exact, exact_pop);

  // asy
  auto* asy = app.add_subcommand("asy", "asymptotic MSE diagnostics");
  std::string asy_functional = "mean";
  std::size_t asy_n = 0;
  PopArgs asy_pop;
  asy->add_option("--functional", asy_functional, "functional")->required();
  asy->add_option("--n", asy_n, "sample size")->required();
  add_pop_flags(asy, asy_pop);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*gen) {
    const std::size_t d = model == "univariate" ? 1 : 2;
    for (const auto* v : {&alpha, &beta, &sigma})
      if (!v->empty() && v->size() != d) {
        std::fprintf(stderr, "svy gen: --alpha/--beta/--sigma need %zu value(s) for %s\n", d,
                     model.c_str());
        return 1;
      }
    svy_population* pop = nullptr;
    auto s = svy_population_generate(model.c_str(), n_pop, seed,
                                     alpha.empty() ? nullptr : alpha.data(),
                                     beta.empty() ? nullptr : beta.data(),
                                     sigma.empty() ? nullptr : sigma.data(), gamma_mean,
                                     gamma_sd, &pop);
    if (s != SVY_OK) return report(s, "gen");
    s = svy_population_save_csv(pop, out_csv.c_str(), "x", d == 1 ? "y" : "z1,z2");
    svy_population_free(pop);
    if (s != SVY_OK) return report(s, "gen");
    return 0;
  }

  if (*run) {
    svy_report* rep = nullptr;
    auto s = svy_experiment_run_file(config.c_str(), threads, &rep);
    if (s == SVY_ERR_IO) s = SVY_ERR_CONFIG;  // an unreadable config is a config error
    if (s != SVY_OK) return report(s, "run");
    s = svy_report_write(rep, out_dir.c_str());
    char* text = nullptr;
    if (s == SVY_OK) s = svy_report_summary(rep, &text);
    svy_report_free(rep);
    if (s != SVY_OK) return report(s, "run");
    std::fputs(text, stdout);
    svy_string_free(text);
    return 0;
  }

  if (*exact) {
    svy_population* pop = nullptr;
    auto s = open_pop(exact_pop, &pop);
    if (s != SVY_OK) return report(s, "exact");
    svy_exact_summary sum{};
    s = svy_exact_moments(pop, design.c_str(), estimator.c_str(), functional.c_str(), n, &sum);
    svy_population_free(pop);
    if (s == SVY_ERR_UNSUPPORTED || s == SVY_ERR_ENUMERATION_TOO_LARGE) {
      report(s, "exact");
      return 2;
    }
    if (s != SVY_OK) return report(s, "exact");
    std::printf("support_size %zu\n", sum.support_size);
    std::printf("expectation  %.12f\n", sum.expectation);
    std::printf("truth        %.12f\n", sum.truth);
    std::printf("bias         %.12f\n", sum.bias);
    std::printf("variance     %.12f\n", sum.variance);
    std::printf("mse          %.12f\n", sum.mse);
    return 0;
  }

  if (*asy) {
    svy_population* pop = nullptr;
    auto s = open_pop(asy_pop, &pop);
    if (s != SVY_OK) return report(s, "asy");
    svy_asymptotics a{};
    s = svy_asymptotics_compute(pop, asy_functional.c_str(), asy_n, &a);
    svy_population_free(pop);
    if (s != SVY_OK) return report(s, "asy");
    std::printf("lambda  %.6g\n", a.lambda);
    std::printf("gamma   %.6g\n", a.gamma);
    std::printf("phi     %.6g\n", a.phi);
    for (int j = 0; j < 9; ++j) {
      if (a.delta_ok[j]) std::printf("delta2_%d %.6g\n", j + 1, a.delta_sq[j]);
      else std::printf("delta2_%d undefined\n", j + 1);
    }
    std::printf("\nclass  design  estimator  delta2\n");
    const char* designs[] = {"SRSWOR", "LMS", "RS", "RHC"};
    const char* estimators[] = {"HT", "Hajek", "Ratio", "Product", "RHC", "GREG", "PEML"};
    for (const char* d : designs)
      for (const char* e : estimators) {
        int cls = 0;
        if (svy_equivalence_class(e, d, 0, &cls) != SVY_OK) continue;
        if (a.delta_ok[cls - 1])
          std::printf("%-6d %-7s %-10s %.6g\n", cls, d, e, a.delta_sq[cls - 1]);
        else
          std::printf("%-6d %-7s %-10s undefined\n", cls, d, e);
      }
    return 0;
  }
  return 1;
}

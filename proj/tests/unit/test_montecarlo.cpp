#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "montecarlo.hpp"
#include "support.hpp"

using namespace svy;
using testutil::code_of;

namespace {

const char* kSmall = R"({
  "population": {"model": "univariate", "n_pop": 400, "seed": 3},
  "cells": [
    {"label": "a", "design": "SRSWOR", "estimator": "PEML"},
    {"label": "b", "design": "SRSWOR", "estimator": "HT"},
    {"label": "c", "design": "RS", "estimator": "HT"},
    {"label": "d", "design": "RHC", "estimator": "RHC"},
    {"label": "v", "design": "SRSWOR", "estimator": "Hajek", "functional": "variance"}
  ],
  "sample_sizes": [10, 20],
  "replicates": 200,
  "seed": 9,
  "jackknife": true,
  "relative_efficiency": [["a", "b"], ["a", "c"]]
})";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empirical MSE and relative efficiency") {
  CHECK(empirical_mse({2, 2, 2}, 2) == 0.0);
  CHECK(empirical_mse({1, 3}, 2) == 1.0);
  CHECK(empirical_mse({5, 1, 3, 9}, 4) == empirical_mse({9, 3, 5, 1}, 4));
  CHECK(code_of([] { empirical_mse({}, 1); }) == ErrorCode::Parameter);
  CHECK(relative_efficiency(2, 2) == 1.0);
  CHECK(relative_efficiency(2, 4) == 2.0);
  CHECK(relative_efficiency(3, 7) * relative_efficiency(7, 3) == doctest::Approx(1.0));
  CHECK(code_of([] { relative_efficiency(0, 1); }) == ErrorCode::UndefinedRatio);
}

TEST_CASE("one replicate gives the squared error of that draw") {
  auto cfg = parse_config(kSmall);
  cfg.replicates = 1;
  cfg.jackknife = false;
  const auto pop = materialize(cfg.population);
  const auto r = run_experiment(cfg, pop);
  const auto& res = r.result("a", 10);
  CHECK(res.evaluated == 1);
  CHECK(res.mse == doctest::Approx((res.mean_estimate - res.truth) * (res.mean_estimate - res.truth)));
}

TEST_CASE("reports are deterministic and thread-count independent") {
  const auto cfg = parse_config(kSmall);
  const auto pop = materialize(cfg.population);
  const auto r1 = run_experiment(cfg, pop, 1);
  const auto r2 = run_experiment(cfg, pop, 1);
  const auto r4 = run_experiment(cfg, pop, 4);
  for (auto* fn : {&write_mse_csv, &write_re_csv, &write_ci_csv, &write_summary}) {
    std::ostringstream a, b, c;
    (*fn)(r1, a);
    (*fn)(r2, b);
    (*fn)(r4, c);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
  }
}

TEST_CASE("report contents") {
  const auto cfg = parse_config(kSmall);
  const auto pop = materialize(cfg.population);
  const auto r = run_experiment(cfg, pop);
  CHECK(r.results.size() == 10);
  CHECK(r.relative_efficiencies.size() == 4);
  for (const auto& res : r.results) {
    CHECK(res.mse >= 0.0);
    CHECK(res.evaluated + res.failures == 200);
    if (res.has_ci) CHECK((res.coverage >= 0.0 && res.coverage <= 1.0));
    CHECK(res.truth == r.truths[res.cell]);
  }
  for (const auto& re : r.relative_efficiencies) {
    REQUIRE(re.re.has_value());
    CHECK(*re.re > 0.0);
    CHECK(*re.re == doctest::Approx(r.result(re.denominator, re.n).mse / r.result(re.numerator, re.n).mse));
  }
  CHECK(r.truths[4] == doctest::Approx(population_value(Functional::variance(), pop)));

  // cells on one design consume the same draw: HT and Hajek coincide under SRSWOR
  auto paired = parse_config(R"({"population": {"model": "univariate", "n_pop": 300},
    "cells": [{"label": "ht", "design": "SRSWOR", "estimator": "HT"},
              {"label": "hj", "design": "SRSWOR", "estimator": "Hajek"}],
    "sample_sizes": [15], "replicates": 50})");
  const auto pr = run_experiment(paired, materialize(paired.population));
  CHECK(pr.result("ht", 15).mse == doctest::Approx(pr.result("hj", 15).mse).epsilon(1e-12));

  const auto dir = testutil::scratch("montecarlo");
  write_report(r, dir);
  const auto mse = slurp(dir / "mse.csv");
  CHECK(mse.rfind("cell,design,estimator,functional,n,", 0) == 0);
  CHECK(slurp(dir / "re.csv").rfind("numerator,denominator,n,re", 0) == 0);
  CHECK(!slurp(dir / "ci.csv").empty());
}

TEST_CASE("config errors name the field") {
  auto msg = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg("{").find("JSON") != std::string::npos);
  CHECK(msg(R"({"cells": []})").find("population") != std::string::npos);
  CHECK(msg(R"({"population": {"model": "univariate"}, "cells": [{"design": "XX", "estimator": "HT"}]})")
            .find("cells[0].design") != std::string::npos);
  CHECK(msg(R"({"population": {"model": "univariate"}, "cells": [{"design": "RHC", "estimator": "HT"}]})")
            .find("cells[0]") != std::string::npos);
  CHECK(msg(R"({"population": {"model": "univariate"}, "cells": [{"design": "RS", "estimator": "HT"}], "replicates": 0})")
            .find("replicates") != std::string::npos);
  CHECK(msg(R"({"population": {"model": "univariate"}, "cells": [{"design": "RS", "estimator": "HT"}], "bogus": 1})")
            .find("bogus") != std::string::npos);
  CHECK(msg(R"({"population": {"model": "univariate"}, "cells": [{"label": "a", "design": "RS", "estimator": "HT"}],
               "relative_efficiency": [["a", "zz"]]})")
            .find("relative_efficiency[0]") != std::string::npos);

  auto cfg = parse_config(R"({"population": {"model": "univariate", "n_pop": 50},
      "cells": [{"design": "SRSWOR", "estimator": "HT", "functional": "correlation:0,1"}]})");
  const auto pop = materialize(cfg.population);
  CHECK(code_of([&] { validate_config(cfg, pop); }) == ErrorCode::Config);
  cfg.cells[0].functional = Functional::mean();
  cfg.sample_sizes = {50};
  CHECK(code_of([&] { validate_config(cfg, pop); }) == ErrorCode::Config);
}

TEST_CASE("csv population source") {
  const auto dir = testutil::scratch("mc_csv");
  const auto pop = generate(LinearModelSpec::univariate_default(), 100, 4);
  save_csv(pop, dir / "pop.csv", "size", {"value"});
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"population": {"csv": "pop.csv", "x_column": "size", "y_columns": ["value"]},
            "cells": [{"label": "p", "design": "LMS", "estimator": "PEML"}],
            "sample_sizes": [10], "replicates": 20})";
  }
  const auto cfg = load_config(dir / "cfg.json");
  const auto r = run_experiment(cfg);
  CHECK(r.result("p", 10).evaluated + r.result("p", 10).failures == 20);
  CHECK(r.truths[0] == doctest::Approx(population_value(Functional::mean(), pop)));
}

#include "doctest.h"

#include "fsm/errors.hpp"
#include "fsm/potential_io.hpp"
#include "fsm/run_config.hpp"

#include <cmath>
#include <string>

using namespace fsm;

namespace {

std::string error_of(const std::string& text) {
  try {
    (void)parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& field) {
  return msg.find("'" + field + "'") != std::string::npos;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_run_config("{}");
  CHECK(c.params.M == 2);
  CHECK(c.params.N == 500);
  CHECK(c.params.K == 4);
  CHECK(c.params.r == 1.0);
  CHECK(c.params.convention == CutoffConvention::StrictlyBelow);
  CHECK(c.strategy.kind == StrategyKind::ByIndex);
  CHECK(c.strategy.index == 1);
  CHECK(c.tol == 1e-12);
  CHECK(c.max_iter == 50);
  CHECK(c.n_exact == 1000);
  CHECK(c.regularity_cutoff() == 2000);
  CHECK(c.family_t() == 1.0);
  CHECK(c.potential().coefficient(3) == cplx(-5.0 / 3.0));
}

TEST_CASE("fields are parsed") {
  const auto c = parse_run_config(R"({
    "potential": {"L": 2, "coeffs": {"0": -1, "2": [0.5, 0.25]}},
    "L": 2, "M": 3, "N": 40, "K": 6, "r": 0.5, "alpha": 2, "convention": "up_to",
    "strategy": "target", "target": -3.5, "lambda0": -4, "tol": 1e-10, "max_iter": 9,
    "N_e": 80, "norm_cutoff": 100, "s": 0.5, "reference": false, "seed": 42, "out": "x.json",
    "sweep": {"axis": "N", "grid": "10:30:10", "jobs": 2},
    "audit": {"fsmap_trials": 3, "perturbation_trials": 4, "perturbation_dim": 6,
              "M_values": [4], "max_order": 2, "rhs_factor": 0.5}})");
  CHECK(c.L == 2.0);
  CHECK(c.params.M == 3);
  CHECK(c.params.N == 40);
  CHECK(c.params.K == 6);
  CHECK(c.params.r == 0.5);
  CHECK(c.params.alpha == 2.0);
  CHECK(c.params.convention == CutoffConvention::UpTo);
  CHECK(c.strategy.kind == StrategyKind::ByTarget);
  CHECK(c.strategy.target == -3.5);
  CHECK(c.lambda0 == -4.0);
  CHECK(c.max_iter == 9);
  CHECK(c.regularity_cutoff() == 100);
  CHECK(!c.reference);
  CHECK(c.seed == 42);
  CHECK(c.sweep.axis == SweepAxis::N);
  CHECK(c.sweep.grid == std::vector<int>{10, 20, 30});
  CHECK(c.sweep.jobs == 2);
  CHECK(c.audit.m_values == std::vector<int>{4});
  CHECK(c.audit.rhs_factor == 0.5);
  CHECK(std::isnan(c.family_t()));
  const auto v = c.potential();
  CHECK(v.period() == 2.0);
  CHECK(v.coefficient(-2) == cplx(0.5, -0.25));
}

TEST_CASE("errors name the offending field") {
  CHECK(mentions(error_of(R"({"M": "two"})"), "M"));
  CHECK(mentions(error_of(R"({"N": 1, "M": 2})"), "N"));
  CHECK(mentions(error_of(R"({"K": -1})"), "K"));
  CHECK(mentions(error_of(R"({"bogus": 1})"), "bogus"));
  CHECK(mentions(error_of(R"({"convention": "sometimes"})"), "convention"));
  CHECK(mentions(error_of(R"({"strategy": "target"})"), "target"));
  CHECK(mentions(error_of(R"({"tol": 0})"), "tol"));
  CHECK(mentions(error_of(R"({"potential": 3})"), "potential"));
  CHECK(mentions(error_of(R"({"potential": {"family": "Vt"}})"), "potential"));
  CHECK(mentions(error_of(R"({"sweep": {"axis": "Z"}})"), "sweep.axis"));
  CHECK(mentions(error_of(R"({"audit": {"M_values": [0]}})"), "audit.M_values"));
  CHECK(error_of("{\"M\": ").find("malformed JSON") != std::string::npos);
  CHECK(error_of("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("potential documents") {
  CHECK(parse_potential(R"({"family": "Vt", "t": 0})").coefficient(7) == cplx(-5.0));
  CHECK(parse_potential(R"({"family": "Vt", "t": 2, "v0": 1, "amplitude": 2})").coefficient(2) == cplx(0.5));
  CHECK(parse_potential(R"({"coeffs": {"1": [1, 2]}})").coefficient(-1) == cplx(1.0, -2.0));
  CHECK_THROWS_AS(parse_potential(R"({"coeffs": {"1": [1, 2], "-1": [3, 0]}})"), ConfigError);
  CHECK_THROWS_AS(parse_potential(R"({"coeffs": {"0": [1, 2]}})"), ConfigError);
  CHECK_THROWS_AS(parse_potential(R"({"coeffs": {}, "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(load_potential("/nonexistent/potential.json"), ConfigError);
}

TEST_CASE("grid strings") {
  CHECK(parse_grid("0:8:2") == std::vector<int>{0, 2, 4, 6, 8});
  CHECK(parse_grid("5,1,3") == std::vector<int>{5, 1, 3});
  CHECK(parse_grid("7") == std::vector<int>{7});
  CHECK_THROWS_AS(parse_grid("1:5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:5:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
}

TEST_CASE("echo round-trips") {
  const auto c = parse_run_config(R"({"M": 3, "K": 2, "sweep": {"axis": "K", "grid": [1, 2], "jobs": 4}})");
  const auto again = parse_run_config(c.echo());
  CHECK(again.echo() == c.echo());
  CHECK(c.echo().find("jobs") == std::string::npos);
}

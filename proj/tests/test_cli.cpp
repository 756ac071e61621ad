#include "doctest.h"

#include "json.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = FSM_WORK_DIR;
const fs::path kFixtures = FSM_FIXTURE_DIR;

fs::path work(const std::string& name) {
  fs::create_directories(kWork);
  return kWork / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = work(name);
  std::ofstream(p) << text;
  return p;
}

// Runs the CLI with stdout and stderr captured into files next to the config.
struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run fsm(const std::string& args, const std::string& tag) {
  const auto o = work(tag + ".stdout");
  const auto e = work(tag + ".stderr");
  const std::string cmd =
      std::string("\"") + FSM_CLI_PATH + "\" " + args + " > \"" + o.string() + "\" 2> \"" + e.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

const std::string kZeroPotential = R"("potential": {"L": 1, "coeffs": {"0": 0}})";

}  // namespace

TEST_CASE("solve with V = 0") {
  const auto cfg = write_config("zero.json", "{" + kZeroPotential + R"(, "M": 2, "N": 20, "K": 2, "N_e": 40})");
  const auto out = work("zero_solve.json");
  const auto r = fsm("solve --config \"" + cfg.string() + "\" --out \"" + out.string() + "\"", "zero_solve");
  CHECK(r.code == 0);
  const json j = json::parse(slurp(out));
  CHECK(j["format_version"] == 1);
  CHECK(j["config"]["M"] == 2);
  CHECK(j["lambda_sigma"].get<double>() == 0.0);
  CHECK(j["scf_count"] == 1);
  CHECK(j["converged"] == true);
  CHECK(j["reference"]["err_val"].get<double>() <= 1e-12);
  CHECK(j["lifted_vector"].size() == 39);
  CHECK(r.out.find("lambda_sigma") != std::string::npos);
}

TEST_CASE("malformed configs exit 1 naming the field") {
  const auto bad = write_config("bad.json", R"({"M": "two"})");
  auto r = fsm("solve --config \"" + bad.string() + "\"", "bad");
  CHECK(r.code == 1);
  CHECK(r.err.find("'M'") != std::string::npos);

  const auto unknown = write_config("unknown.json", R"({"colour": 3})");
  r = fsm("solve --config \"" + unknown.string() + "\"", "unknown");
  CHECK(r.code == 1);
  CHECK(r.err.find("'colour'") != std::string::npos);

  const auto broken = write_config("broken.json", R"({"M": )");
  r = fsm("solve --config \"" + broken.string() + "\"", "broken");
  CHECK(r.code == 1);

  r = fsm("solve --config /nonexistent/run.json", "missing");
  CHECK(r.code == 1);
  r = fsm("frobnicate", "nosub");
  CHECK(r.code == 1);
}

TEST_CASE("non-convergence exits 2") {
  const auto cfg = write_config("noconv.json", R"({"M": 1, "N": 100, "K": 10, "max_iter": 1, "reference": false})");
  CHECK(fsm("solve --config \"" + cfg.string() + "\"", "noconv").code == 2);
}

TEST_CASE("t=1 solve matches the pinned golden result") {
  const auto out = work("golden.json");
  const auto r = fsm("solve --config \"" + (kFixtures / "golden_t1_solve.config.json").string() + "\" --out \"" +
                         out.string() + "\"",
                     "golden");
  REQUIRE(r.code == 0);
  const json got = json::parse(slurp(out));
  const json want = json::parse(slurp(kFixtures / "golden_t1_solve.expected.json"));
  const json oracle = json::parse(slurp(kFixtures / "oracle.json"));
  // The pinned file itself agrees with the independent dense oracle.
  CHECK(std::abs(want["lambda_sigma"].get<double>() -
                 oracle["fixed_point_t1"]["M2_N500_K4_i1"]["lambda_sigma"].get<double>()) < 1e-10);
  CHECK(std::abs(want["reference"]["lambda_star"].get<double>() - oracle["reference_t1_Ne1000"][0].get<double>()) <
        1e-8);
  CHECK(got["scf_count"] == want["scf_count"]);
  CHECK(std::abs(got["lambda_sigma"].get<double>() - want["lambda_sigma"].get<double>()) < 1e-10);
  const auto& g = got["reference"];
  const auto& w = want["reference"];
  CHECK(std::abs(g["lambda_star"].get<double>() - w["lambda_star"].get<double>()) < 1e-9);
  CHECK(std::abs(g["err_val"].get<double>() - w["err_val"].get<double>()) < 1e-9);
  CHECK(g["err_vec"].get<double>() == doctest::Approx(w["err_vec"].get<double>()).epsilon(1e-6));
  CHECK(g["epsilon_bound"].get<double>() == doctest::Approx(w["epsilon_bound"].get<double>()).epsilon(1e-12));
}

TEST_CASE("sweep") {
  const auto cfg = write_config("sweep.json", R"({"M": 2, "N": 60, "K": 0, "N_e": 120, "norm_cutoff": 120,
    "sweep": {"axis": "K", "grid": "0:3:1", "M_values": [1, 2]}})");
  const auto csv = work("sweep.csv");
  auto r = fsm("sweep --config \"" + cfg.string() + "\" --out \"" + csv.string() + "\"", "sweep");
  CHECK(r.code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  int comments = 0, rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("#", 0) == 0) ++comments;
    else ++rows;
  }
  CHECK(comments == 2);
  CHECK(rows == 1 + 4 * 2);

  // Same config, more workers: identical bytes.
  const std::string first = slurp(csv);
  r = fsm("sweep --config \"" + cfg.string() + "\" --jobs 3 --out \"" + csv.string() + "\"", "sweep_jobs");
  CHECK(r.code == 0);
  CHECK(slurp(csv) == first);

  const auto empty = write_config("sweep_empty.json", R"({"sweep": {"axis": "K", "grid": []}})");
  CHECK(fsm("sweep --config \"" + empty.string() + "\"", "sweep_empty").code == 1);
  CHECK(fsm("sweep --config \"" + cfg.string() + "\" --grid 3,1", "sweep_order").code == 1);
  CHECK(fsm("sweep --config \"" + cfg.string() + "\" --axis Q", "sweep_axis").code == 1);
}

TEST_CASE("audit") {
  const std::string small = R"("N": 40, "N_e": 80, "norm_cutoff": 80,
    "audit": {"fsmap_trials": 10, "perturbation_trials": 10, "perturbation_dim": 6, "M_values": [4], "max_order": 3)";
  const auto zero = write_config("audit_zero.json", "{" + kZeroPotential + ", " + small + "}}");
  const auto out = work("audit_zero.jsonl");
  auto r = fsm("audit --config \"" + zero.string() + "\" --out \"" + out.string() + "\"", "audit_zero");
  CHECK(r.code == 0);
  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);
  CHECK(json::parse(line)["format_version"] == 1);
  int bound_lines = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    const std::string name = j["name"];
    if (name.rfind("truncat", 0) == 0 || name.rfind("schur_interaction", 0) == 0) {
      ++bound_lines;
      if (!j["skipped"].get<bool>()) CHECK(j["lhs"].get<double>() == 0.0);
    }
  }
  CHECK(bound_lines > 0);

  const auto t1 = write_config("audit_t1.json", "{" + small + "}}");
  const auto a = work("audit_t1.jsonl");
  const std::string args = "audit --config \"" + t1.string() + "\" --seed 5 --out \"" + a.string() + "\"";
  CHECK(fsm(args, "audit_a").code == 0);
  const std::string first_audit = slurp(a);
  CHECK(fsm(args, "audit_b").code == 0);
  CHECK(slurp(a) == first_audit);

  const auto corrupted = write_config("audit_bad.json", "{" + small + R"(, "rhs_factor": 0}})");
  r = fsm("audit --config \"" + corrupted.string() + "\"", "audit_bad");
  CHECK(r.code == 2);
  CHECK(r.err.find("violation") != std::string::npos);
}

TEST_CASE("fsmap-check") {
  const auto cfg = write_config("fsmap.json", R"({"audit": {"fsmap_trials": 20}})");
  const auto out = work("fsmap.jsonl");
  const auto r = fsm("fsmap-check --config \"" + cfg.string() + "\" --seed 3 --out \"" + out.string() + "\"", "fsmap");
  CHECK(r.code == 0);
  CHECK(r.out.find("20 trial(s)") != std::string::npos);
  CHECK(!slurp(out).empty());
}

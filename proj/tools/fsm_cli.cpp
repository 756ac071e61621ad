// fsm: solve, sweep and audit driver.
//
//   fsm solve       --config run.json [--out result.json]
//   fsm sweep       --config run.json --axis K --grid 0:10:1 [--jobs 4] [--out sweep.csv]
//   fsm audit       --config run.json [--seed 7] [--out audit.jsonl]
//   fsm fsmap-check [--config run.json] [--seed 7] [--out checks.jsonl]
//
// Flags override the corresponding config fields. Exit codes: 0 success,
// 1 configuration error, 2 non-convergence (solve) or violated audit.

#include "fsm/analysis.hpp"
#include "fsm/eigensolver.hpp"
#include "fsm/errors.hpp"
#include "fsm/fs_operator.hpp"
#include "fsm/run_config.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace fsm;
using ojson = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kFailure = 2;

struct Flags {
  std::string config;
  std::string axis;
  std::string grid;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::string out;
};

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? parse_run_config("{}") : load_run_config(f.config);
  if (!f.axis.empty()) c.sweep.axis = parse_axis(f.axis);
  if (!f.grid.empty()) c.sweep.grid = parse_grid(f.grid);
  if (f.jobs) c.sweep.jobs = *f.jobs;
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  c.validate();
  return c;
}

// Writes through `emit` to c.out, or to stdout when no path is configured.
template <class Emit>
void write_output(const RunConfig& c, Emit&& emit) {
  if (c.out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream os(c.out, std::ios::binary);
  if (!os) throw ConfigError("out: cannot open '" + c.out + "' for writing");
  emit(os);
}

ojson complex_array(const CVector& v) {
  ojson a = ojson::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v[k].real(), v[k].imag()});
  return a;
}

double norm_for(const RunConfig& c, const FourierPotential& v) {
  return regularity_norm(v, c.params.r, c.regularity_cutoff());
}

int cmd_solve(const Flags& flags) {
  const RunConfig c = resolve(flags);
  const auto v = c.potential();
  const FeshbachSchurOperator op(c.params, v);
  FixedPointResult fp;
  try {
    fp = solve_fixed_point(op, c.strategy, c.options());
  } catch (const DomainError& e) {
    std::cerr << "fsm solve: " << e.what() << '\n';
    return kFailure;
  }

  ojson out;
  out["format_version"] = kFormatVersion;
  out["config"] = ojson::parse(c.echo());
  out["strategy"] = fp.strategy.label();
  out["converged"] = fp.converged;
  out["lambda_sigma"] = fp.lambda_sigma;
  out["initial_guess"] = fp.initial_guess;
  out["scf_count"] = fp.scf_count;
  out["residual"] = fp.residual;
  out["iterates"] = fp.iterates;

  std::optional<ErrorRecord> rec;
  if (c.reference) {
    const int m = static_cast<int>(op.coarse_basis().dimension());
    const int i = c.strategy.kind == StrategyKind::ByIndex ? c.strategy.index : 0;
    const auto ref = reference_solve(v, c.n_exact, static_cast<std::size_t>(std::max(i, m)), c.params.convention);
    int idx = i;
    if (idx == 0) {
      Eigen::Index best = 0;
      (ref.eigenvalues.head(static_cast<Eigen::Index>(ref.count)).array() - fp.lambda_sigma).abs().minCoeff(&best);
      idx = static_cast<int>(best) + 1;
    }
    const double t = v.family() ? v.family()->t : std::nan("");
    rec = compute_errors(fp, c.params, v, ref, {idx, t, c.s, norm_for(c, v)});
    ojson r;
    r["N_e"] = c.n_exact;
    r["i"] = idx;
    r["lambda_star"] = ref.eigenvalues[idx - 1];
    r["gap"] = ref.gaps[static_cast<std::size_t>(idx - 1)];
    r["err_val"] = rec->err_val;
    r["err_vec"] = rec->err_vec;
    r["err_vec_coarse_s"] = rec->err_vec_coarse_s;
    r["epsilon_bound"] = rec->epsilon_bound;
    out["reference"] = r;
  }
  out["coarse_vector"] = complex_array(fp.phi_sigma);
  out["lifted_vector"] = complex_array(fp.lifted.fine);

  std::printf("strategy      %s\n", fp.strategy.label().c_str());
  std::printf("sigma         M=%d N=%d K=%d (%s)\n", c.params.M, c.params.N, c.params.K,
              to_string(c.params.convention));
  std::printf("lambda_sigma  %.15g\n", fp.lambda_sigma);
  std::printf("scf_count     %d (%s)\n", fp.scf_count, fp.converged ? "converged" : "not converged");
  if (rec) std::printf("err_val       %.3e\nerr_vec       %.3e\n", rec->err_val, rec->err_vec);

  if (!c.out.empty()) {
    write_output(c, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
  }
  return fp.converged ? kOk : kFailure;
}

int cmd_sweep(const Flags& flags) {
  const RunConfig c = resolve(flags);
  if (!c.sweep.axis) throw ConfigError("sweep: field 'sweep.axis' (or --axis) is required");
  if (c.sweep.grid.empty()) throw ConfigError("sweep: field 'sweep.grid' (or --grid) is empty");
  for (std::size_t k = 1; k < c.sweep.grid.size(); ++k) {
    if (c.sweep.grid[k] <= c.sweep.grid[k - 1]) throw ConfigError("sweep: grid must be strictly ascending");
  }
  const auto v = c.potential();
  const int i = c.strategy.kind == StrategyKind::ByIndex ? c.strategy.index : 1;
  std::vector<int> m_values = c.sweep.m_values;
  if (m_values.empty()) m_values.push_back(c.params.M);
  int largest_m = *std::max_element(m_values.begin(), m_values.end());
  if (*c.sweep.axis == SweepAxis::M) largest_m = c.sweep.grid.back();
  const auto count = static_cast<std::size_t>(std::max(i, 2 * largest_m + 1));
  const auto ref = reference_solve(v, c.n_exact, count, c.params.convention);

  SweepSetup setup{c.params, v, c.strategy, c.options(), {}, c.sweep.jobs};
  setup.context = {i, v.family() ? v.family()->t : std::nan(""), c.s, norm_for(c, v)};
  std::vector<ErrorRecord> records;
  for (int m : m_values) {
    setup.base.M = m;
    const auto part = sweep(*c.sweep.axis, c.sweep.grid, setup, ref);
    records.insert(records.end(), part.begin(), part.end());
  }
  write_output(c, [&](std::ostream& os) { write_csv(os, records, c.echo()); });
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.converged ? 0 : 1;
  std::fprintf(stderr, "sweep: %zu point(s), %zu not converged\n", records.size(), failed);
  return kOk;
}

int cmd_audit(const Flags& flags) {
  const RunConfig c = resolve(flags);
  const auto v = c.potential();
  std::vector<BoundAudit> audits;

  const auto fs = fs_map_random_trials(c.audit.fsmap_trials, c.seed);
  audits.push_back(make_audit("fs_map_failures", static_cast<double>(fs.solvable - fs.passed), 0.0,
                              {{"trials", static_cast<double>(fs.trials)},
                               {"solvable", static_cast<double>(fs.solvable)},
                               {"degenerate_checks", static_cast<double>(fs.degenerate_checks)}}));

  const auto pert = perturbation_random_trials(c.audit.perturbation_trials, c.audit.perturbation_dim, c.seed + 1);
  audits.push_back(make_audit("perturbation_violations", static_cast<double>(pert.violations), 0.0,
                              {{"trials", static_cast<double>(pert.trials)},
                               {"audits", static_cast<double>(pert.audits)},
                               {"eigenvalue_checks", static_cast<double>(pert.eigenvalue_checks)},
                               {"eigenvector_checks", static_cast<double>(pert.eigenvector_checks)}}));
  for (const auto& f : pert.failures) audits.push_back(f);

  const double nv = norm_for(c, v);
  const BoundAuditContext ctx{c.n_exact, nv, c.audit.max_order, c.audit.rhs_factor};
  for (int m : c.audit.m_values) {
    FsParams p = c.params;
    p.M = m;
    if (p.N < m) p.N = m;
    const double kap = kappa(PlanewaveBasis(v.period(), m, p.convention), p.r, nv);
    const auto grid = default_lambda_grid(kap);
    auto suite = bound_audit_suite(p, v, grid, ctx);
    audits.insert(audits.end(), suite.begin(), suite.end());
  }
  if (!c.audit.m_values.empty()) {
    const int m = c.audit.m_values.front();
    const SchurComplementOracle oracle(m, c.n_exact, v, c.params.convention);
    const auto ref = reference_solve(v, c.n_exact, 3, c.params.convention);
    for (int i = 1; i <= 3; ++i) audits.push_back(gap_transfer_audit(oracle, ref, i));
  }

  write_output(c, [&](std::ostream& os) { write_audit_jsonl(os, audits, c.echo()); });
  std::size_t skipped = 0;
  for (const auto& a : audits) skipped += a.skipped ? 1 : 0;
  const auto violations = count_violations(audits);
  std::fprintf(stderr, "audit: %zu record(s), %zu skipped, %zu violation(s)\n", audits.size(), skipped, violations);
  return violations == 0 ? kOk : kFailure;
}

int cmd_fsmap_check(const Flags& flags) {
  const RunConfig c = resolve(flags);
  const auto fs = fs_map_random_trials(c.audit.fsmap_trials, c.seed);
  if (!c.out.empty()) {
    write_output(c, [&](std::ostream& os) {
      ojson header;
      header["format_version"] = kFormatVersion;
      header["config"] = ojson::parse(c.echo());
      os << header.dump() << '\n';
      for (std::size_t t = 0; t < fs.reports.size(); ++t) {
        for (const auto& chk : fs.reports[t].checks) {
          ojson j;
          j["trial"] = t;
          j["lambda"] = chk.lambda;
          j["multiplicity"] = chk.multiplicity;
          j["solvable"] = chk.solvable;
          j["complement_distance"] = chk.complement_distance;
          j["smallest_singular"] = chk.smallest_singular;
          j["nullity"] = chk.nullity;
          j["reconstruction_error"] = chk.reconstruction_error;
          j["pass"] = chk.pass;
          os << j.dump() << '\n';
        }
      }
    });
  }
  std::printf("fsmap-check: %zu trial(s), %zu solvable check(s), %zu passed, %zu degenerate\n", fs.trials,
              fs.solvable, fs.passed, fs.degenerate_checks);
  return fs.passed == fs.solvable ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feshbach-Schur planewave eigensolver"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration");
    sub->add_option("--out", flags.out, "output path");
    sub->add_option("--seed", flags.seed, "seed for randomized audits");
  };
  auto* solve = app.add_subcommand("solve", "one fixed-point solve");
  auto* sweep_cmd = app.add_subcommand("sweep", "convergence sweep, CSV output");
  auto* audit = app.add_subcommand("audit", "bound audits, JSON lines output");
  auto* fsmap = app.add_subcommand("fsmap-check", "isospectrality checks on random matrices");
  for (auto* sub : {solve, sweep_cmd, audit, fsmap}) add_common(sub);
  sweep_cmd->add_option("--axis", flags.axis, "K, N or M");
  sweep_cmd->add_option("--grid", flags.grid, "a:b:step or a comma list");
  sweep_cmd->add_option("--jobs", flags.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*solve) return cmd_solve(flags);
    if (*sweep_cmd) return cmd_sweep(flags);
    if (*audit) return cmd_audit(flags);
    if (*fsmap) return cmd_fsmap_check(flags);
  } catch (const ConfigError& e) {
    std::cerr << "fsm: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "fsm: " << e.what() << '\n';
    return kFailure;
  }
  return kConfigError;
}

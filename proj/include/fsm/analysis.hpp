#pragma once

// Error metrics against a fine variational reference, convergence sweeps and
// rate fits, and numerical audits of the perturbation bounds the method rests
// on. Every audited inequality is reported as a BoundAudit, never thrown.

#include "fsm/eigensolver.hpp"
#include "fsm/fs_operator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fsm {

// ---------------------------------------------------------------------------
// Error metrics

struct ErrorRecord {
  FsParams params;
  int i = 1;                        // 1-based eigenvalue index
  std::string strategy;
  double t = 0.0;                   // potential family parameter, NaN if none
  double lambda_sigma = 0.0;
  double err_val = 0.0;             // |lambda_star - lambda_sigma|
  double err_vec = 0.0;             // ||phi_i - Q_sigma phi_sigma||
  double err_vec_coarse_s = 0.0;    // ||(1 - Delta)^s (P_M phi_i - phi_sigma)||
  double s = 0.0;
  int scf_count = 0;
  double epsilon_bound = 0.0;
  bool converged = false;
  std::string failure;              // empty unless the point failed
};

// rho_N^{-r} + rho_M^{-r} (4 rho_M^{-r} ||V||_r)^{K+1}
double epsilon_bound(const FsParams& params, double period, double norm_v_r);

struct ErrorContext {
  int i = 1;
  double t = 0.0;
  double s = 1.0;
  double norm_v_r = 0.0;
};

// phi_i is the orthogonal projection of the lifted vector onto the reference
// eigenspace of lambda_star, i.e. the eigenfunction closest to Q phi_sigma.
// Throws AlignmentError if that projection is (numerically) zero.
ErrorRecord compute_errors(const FixedPointResult& fp, const FsParams& params, const FourierPotential& v,
                           const ReferenceSpectrum& reference, const ErrorContext& context);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { K, N, M };

const char* to_string(SweepAxis axis);
SweepAxis parse_axis(const std::string& s);

struct SweepSetup {
  FsParams base;
  FourierPotential potential;
  Strategy strategy;                // index (or target) per point
  FixedPointOptions options;
  ErrorContext context;
  int jobs = 1;
};

// One record per grid point, in grid order regardless of scheduling. Failed
// points are recorded with converged = false and a failure message.
std::vector<ErrorRecord> sweep(SweepAxis axis, std::span<const int> grid, const SweepSetup& setup,
                               const ReferenceSpectrum& reference);

// ---------------------------------------------------------------------------
// Rate fits

// Least-squares slope of log(err) against log(x), negated so that decay is
// positive. Nonpositive errors are dropped with a warning; fewer than three
// usable points throws InsufficientDataError.
double fit_rate(std::span<const double> x, std::span<const double> err);

// Per-unit-step decay ratio from a least-squares fit of log(err) against x.
double fit_decay_ratio(std::span<const double> x, std::span<const double> err);

// Indices of points whose error exceeds factor * floor.
std::vector<std::size_t> pre_knee(std::span<const double> err, double floor, double factor = 3.0);

enum class ErrorField { Value, Vector };
std::vector<double> axis_values(std::span<const ErrorRecord> records, SweepAxis axis);
std::vector<double> error_values(std::span<const ErrorRecord> records, ErrorField field);

// fit_rate over `records` restricted to points above three times the floor.
struct RateFit {
  double rate = 0.0;
  double floor = 0.0;
  std::vector<std::size_t> window;
};
RateFit fit_pre_knee_rate(std::span<const ErrorRecord> records, SweepAxis axis, ErrorField field, double floor);

// ---------------------------------------------------------------------------
// Bound audits

struct BoundAudit {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = true;
  bool skipped = false;
  std::string reason;                                // why skipped
  std::vector<std::pair<std::string, double>> inputs;
};

// satisfied <=> lhs <= rhs + 1e-9 |rhs|
BoundAudit make_audit(std::string name, double lhs, double rhs,
                      std::vector<std::pair<std::string, double>> inputs = {});
BoundAudit skipped_audit(std::string name, std::string reason,
                         std::vector<std::pair<std::string, double>> inputs = {});

std::size_t count_violations(std::span<const BoundAudit> audits);

// Isospectrality of the Feshbach-Schur map for a finite Hermitian matrix with
// P the projection onto the first coarse_dim coordinates.
struct FsMapEigenCheck {
  double lambda = 0.0;
  int multiplicity = 0;
  bool solvable = true;             // H_perp - lambda invertible (well conditioned)
  double complement_distance = 0.0; // dist(lambda, spec H_perp)
  double smallest_singular = 0.0;   // of F_P(H - lambda), relative to ||H||
  int nullity = 0;
  double reconstruction_error = 0.0;
  bool pass = true;
};

struct FsMapReport {
  std::vector<FsMapEigenCheck> checks;
  std::size_t solvable = 0;
  std::size_t passed = 0;
  bool all_passed() const noexcept { return passed == solvable; }
};

FsMapReport fs_map_check(const CMatrix& h, int coarse_dim, double tol = 1e-9);

struct FsMapTrialSummary {
  std::size_t trials = 0;
  std::size_t solvable = 0;  // solvable eigenvalue checks
  std::size_t passed = 0;
  std::size_t degenerate_checks = 0;  // checks with multiplicity > 1
  std::vector<FsMapReport> reports;
};

// Random Hermitian matrices of dimension in [min_dim, max_dim] with coarse
// dimension in [1, max_coarse]; a third of them carry a 2-fold degenerate
// eigenvalue.
FsMapTrialSummary fs_map_random_trials(int trials, std::uint64_t seed, int min_dim = 4, int max_dim = 12,
                                       int max_coarse = 4, double tol = 1e-9);

// ||(H0 + alpha)^{-1/2} W (H0 + alpha)^{-1/2}||
double relative_form_norm(const CMatrix& h0, const CMatrix& w, double alpha);

// Eigenvalue shifts for every index, and the isolated-eigenvalue and
// eigenvector bounds for every cluster of H0 whose smallness hypothesis holds.
// Throws ConfigError if H0 + alpha is not positive definite.
std::vector<BoundAudit> perturbation_audit(const CMatrix& h0, const CMatrix& w, double alpha);

struct PerturbationSummary {
  std::size_t trials = 0;
  std::size_t audits = 0;
  std::size_t violations = 0;
  std::size_t eigenvalue_checks = 0;   // isolated-eigenvalue bound evaluated
  std::size_t eigenvector_checks = 0;  // eigenvector bounds evaluated
  std::vector<BoundAudit> failures;
};

PerturbationSummary perturbation_random_trials(int trials, int dim, std::uint64_t seed);

struct BoundAuditContext {
  int n_exact = 1000;       // fine audit cutoff N_e
  double norm_v_r = 0.0;    // ||V||_r at the audit cutoff
  int max_order = 8;        // truncation orders 0..max_order for the truncation-error audit
  double rhs_factor = 1.0;  // test hook: scales every right-hand side
};

// Five lambda points below kappa_M: kappa_M / 2 - |kappa_M| * {1.5, 1, 0.5, 0.25, 0.05}.
std::vector<double> default_lambda_grid(double kappa_m);

std::vector<BoundAudit> bound_audit_suite(const FsParams& params, const FourierPotential& v,
                                          std::span<const double> lambda_grid, const BoundAuditContext& context);

// The gap of lambda_i inside spec(H_M(lambda_i)) versus its gap in the
// reference spectrum.
BoundAudit gap_transfer_audit(const SchurComplementOracle& oracle, const ReferenceSpectrum& reference, int i);

// ||diag(w) A diag(w)|| with the regularity weights of the coarse basis.
double coarse_r_norm(const CMatrix& a, const PlanewaveBasis& coarse, double r);

// ---------------------------------------------------------------------------
// Reports

inline constexpr int kFormatVersion = 1;

// Comment lines "# format_version=1" and "# config=<json>", then the header
// row and one row per record with 17 significant digits.
void write_csv(std::ostream& os, std::span<const ErrorRecord> records, const std::string& config_json);

// One JSON object per line: a header with format_version and config, then
// one line per audit.
void write_audit_jsonl(std::ostream& os, std::span<const BoundAudit> audits, const std::string& config_json);

}  // namespace fsm

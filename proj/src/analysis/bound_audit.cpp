#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fsm {

namespace {

using Inputs = std::vector<std::pair<std::string, double>>;

// ||h^{-1/2} A h^{-1/2}|| with h = -Delta - lambda on the mode range of A.
double form_norm(const CMatrix& a, const IndexWindow& window, double lambda) {
  if (window.empty()) return 0.0;
  RVector w(static_cast<Eigen::Index>(window.dimension()));
  for (std::size_t j = 0; j < window.dimension(); ++j) {
    w[static_cast<Eigen::Index>(j)] = 1.0 / std::sqrt(window.hi().laplacian_eigenvalue(window.frequency(j)) - lambda);
  }
  return hermitian_norm(hermitian_part(scale_rows_cols(a, w, w)));
}

double max_eigenvalue(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return hermitian_eigenvalues(hermitian_part(a)).maxCoeff();
}

std::string format_reason(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " (" << value << ")";
  return os.str();
}

}  // namespace

std::vector<double> default_lambda_grid(double kappa_m) {
  const double half = 0.5 * kappa_m;
  const double scale = std::abs(kappa_m);
  std::vector<double> grid;
  for (double f : {1.5, 1.0, 0.5, 0.25, 0.05}) grid.push_back(half - scale * f);
  return grid;
}

std::vector<BoundAudit> bound_audit_suite(const FsParams& params, const FourierPotential& v,
                                          std::span<const double> lambda_grid, const BoundAuditContext& ctx) {
  params.validate();
  if (ctx.n_exact < params.N) throw ConfigError("bound audit: N_e must be at least N");
  const double period = v.period();
  const PlanewaveBasis coarse(period, params.M, params.convention);
  const PlanewaveBasis fine(period, params.N, params.convention);
  const PlanewaveBasis exact(period, ctx.n_exact, params.convention);
  const IndexWindow window(coarse, fine);
  const IndexWindow complement(coarse, exact);
  const double r = params.r;
  const double nv = ctx.norm_v_r;
  const double rho_m = coarse.rho();
  const double rho_n = fine.rho();
  const double rho_mr = std::pow(rho_m, -r);
  const double rho_nr = std::pow(rho_n, -r);
  const double q = 4.0 * rho_mr * nv;
  const double kap = kappa(coarse, r, nv);
  const double f = ctx.rhs_factor;

  const SchurComplementOracle oracle(params.M, ctx.n_exact, v, params.convention);
  const FeshbachSchurOperator op(params, v);
  const CMatrix v_window = potential_block(v, window, window);
  const CMatrix v_complement = potential_block(v, complement, complement);

  const Inputs common = {{"M", params.M},   {"N", params.N},         {"K", params.K},
                         {"r", r},          {"N_e", ctx.n_exact},    {"rho_M", rho_m},
                         {"norm_V_r", nv},  {"kappa_M", kap},        {"q", q}};
  auto with = [&](std::initializer_list<std::pair<std::string, double>> extra) {
    Inputs in = common;
    in.insert(in.end(), extra.begin(), extra.end());
    return in;
  };

  std::vector<BoundAudit> out;
  out.push_back(make_audit("complement_lower_bound", kap, f * oracle.complement_bottom(),
                           with({{"complement_bottom", oracle.complement_bottom()}})));

  const double u_m_bound = q < 1.0 ? rho_mr * 4.0 * nv * nv / (1.0 - q) : 0.0;
  const double c2 = q < 1.0 ? 4.0 * rho_nr * nv + 16.0 * rho_mr * rho_mr * nv * nv / (1.0 - q) : 0.0;

  for (std::size_t p = 0; p < lambda_grid.size(); ++p) {
    const double lambda = lambda_grid[p];

    // Relative form bound of the complement potential.
    if (lambda < 0.5 * rho_m && rho_m >= 1.0) {
      const double lhs_window = form_norm(v_window, window, lambda);
      const double lhs_complement = form_norm(v_complement, complement, lambda);
      out.push_back(make_audit("window_form_norm", lhs_window, f * lhs_complement, with({{"lambda", lambda}})));
      out.push_back(make_audit("complement_form_norm", lhs_complement, f * q, with({{"lambda", lambda}})));
    } else {
      out.push_back(skipped_audit("complement_form_norm", "requires lambda < rho_M / 2 and rho_M >= 1",
                                  with({{"lambda", lambda}})));
    }

    // Truncated and exact interaction norms.
    if (lambda <= std::min(0.5 * rho_m, kap) && rho_m >= 1.0) {
      const double lhs = coarse_r_norm(op.interaction(lambda), coarse, r);
      double series = 0.0;
      for (int k = 0; k <= params.K; ++k) series += std::pow(q, k);
      out.push_back(make_audit("truncated_interaction_norm", lhs, f * 4.0 * rho_mr * nv * nv * series,
                               with({{"lambda", lambda}})));
      if (q < 1.0) {
        out.push_back(make_audit("truncated_interaction_norm_geometric", lhs, f * u_m_bound,
                                 with({{"lambda", lambda}})));
        out.push_back(make_audit("schur_interaction_norm", coarse_r_norm(oracle.interaction(lambda), coarse, r),
                                 f * u_m_bound, with({{"lambda", lambda}})));
      } else {
        out.push_back(skipped_audit("schur_interaction_norm", format_reason("requires 4 rho_M^-r ||V||_r < 1", q),
                                    with({{"lambda", lambda}})));
      }
    } else {
      out.push_back(skipped_audit("truncated_interaction_norm", "requires lambda <= min(rho_M / 2, kappa_M)",
                                  with({{"lambda", lambda}})));
    }

    // Derivative of the exact interaction.
    if (lambda < 0.5 * kap && rho_m >= 1.0 && q < 1.0) {
      const double h = 1e-4 * rho_m;
      auto central = [&](double step) {
        return CMatrix((oracle.interaction(lambda + step) - oracle.interaction(lambda - step)) / (2.0 * step));
      };
      const CMatrix d1 = central(h);
      const CMatrix d2 = central(0.5 * h);
      const CMatrix richardson = (4.0 * d2 - d1) / 3.0;
      const CMatrix exact_derivative = oracle.interaction_derivative(lambda);
      const double lhs = coarse_r_norm(richardson, coarse, r);
      const double closed = coarse_r_norm(exact_derivative, coarse, r);
      const double discrepancy = spectral_norm(richardson - exact_derivative);
      const double rhs = rho_mr / (std::numbers::pi * (kap - 2.0 * lambda)) * 4.0 * nv * nv / (1.0 - q);
      out.push_back(make_audit("schur_derivative_norm", lhs, f * rhs,
                               with({{"lambda", lambda}, {"step", h}, {"closed_form_norm", closed}})));
      out.push_back(make_audit("derivative_consistency", discrepancy,
                               f * 1e-6 * std::max(spectral_norm(exact_derivative), 1e-300),
                               with({{"lambda", lambda}, {"step", h}})));
    } else {
      out.push_back(skipped_audit("schur_derivative_norm",
                                  q < 1.0 ? "requires lambda < kappa_M / 2 and rho_M >= 1"
                                          : format_reason("requires 4 rho_M^-r ||V||_r < 1", q),
                                  with({{"lambda", lambda}})));
    }

    // Truncation error of the Neumann series against the exact interaction.
    if (lambda < std::min(kap, 0.5 * rho_m) && rho_n >= rho_m && rho_m > 1.0 && q < 1.0 && c2 < 1.0) {
      const CMatrix u_exact = oracle.interaction(lambda);
      const double n_term = 4.0 * rho_nr * nv * nv / (1.0 - c2) * std::pow(1.0 + q / (1.0 - q), 2);
      for (int k = 0; k <= ctx.max_order; ++k) {
        FsParams pk = params;
        pk.K = k;
        const FeshbachSchurOperator opk(pk, v);
        const double lhs = coarse_r_norm(u_exact - opk.interaction(lambda), coarse, r);
        const double rhs = n_term + 4.0 * rho_mr * nv * nv / (1.0 - q) * std::pow(q, k + 1);
        out.push_back(make_audit("truncation_error", lhs, f * rhs,
                                 with({{"lambda", lambda}, {"order", k}, {"c2", c2}})));
      }
    } else {
      std::string reason = "requires lambda < min(kappa_M, rho_M / 2)";
      if (!(q < 1.0)) reason = format_reason("requires 4 rho_M^-r ||V||_r < 1", q);
      else if (!(c2 < 1.0)) reason = format_reason("requires the fine-cutoff smallness condition < 1", c2);
      out.push_back(skipped_audit("truncation_error", reason, with({{"lambda", lambda}})));
    }

    // Exact interaction: non-positivity, and monotonicity and Lipschitz bound on consecutive pairs.
    if (lambda < oracle.complement_bottom()) {
      const CMatrix u = oracle.interaction(lambda);
      out.push_back(make_audit("schur_nonpositive", max_eigenvalue(u), f * 1e-12, with({{"lambda", lambda}})));
    }
    if (p + 1 < lambda_grid.size()) {
      const double lo = std::min(lambda, lambda_grid[p + 1]);
      const double hi = std::max(lambda, lambda_grid[p + 1]);
      if (lo < hi && hi < oracle.complement_bottom()) {
        const CMatrix diff = oracle.interaction(hi) - oracle.interaction(lo);
        out.push_back(make_audit("schur_monotone", max_eigenvalue(diff), f * 1e-12,
                                 with({{"lambda", lo}, {"mu", hi}})));
        if (hi < std::min(kap, 0.5 * rho_m) && rho_m >= 1.0 && q < 1.0) {
          const double rhs = (hi - lo) * rho_mr / (std::numbers::pi * (kap - 2.0 * lo)) * 4.0 * nv * nv / (1.0 - q);
          out.push_back(make_audit("schur_lipschitz", coarse_r_norm(diff, coarse, r), f * rhs,
                                   with({{"lambda", lo}, {"mu", hi}})));
        } else {
          out.push_back(skipped_audit("schur_lipschitz",
                                      q < 1.0 ? "requires lambda < mu < min(kappa_M, rho_M / 2)"
                                              : format_reason("requires 4 rho_M^-r ||V||_r < 1", q),
                                      with({{"lambda", lo}, {"mu", hi}})));
        }
      }
    }
  }
  return out;
}

BoundAudit gap_transfer_audit(const SchurComplementOracle& oracle, const ReferenceSpectrum& reference, int i) {
  const Eigen::Index idx = i - 1;
  if (idx < 0 || idx >= reference.eigenvalues.size()) throw ConfigError("gap transfer: index out of range");
  const double lambda = reference.eigenvalues[idx];
  const double ref_gap = reference.gaps[static_cast<std::size_t>(idx)];
  const Inputs inputs = {{"i", i}, {"lambda", lambda}, {"reference_gap", ref_gap}};
  if (!(lambda < oracle.complement_bottom())) {
    return skipped_audit("gap_transfer", "eigenvalue is not below the complement spectrum", inputs);
  }
  const RVector nu = hermitian_eigenvalues(oracle.hamiltonian(lambda));
  Eigen::Index nearest = 0;
  (nu.array() - lambda).abs().minCoeff(&nearest);
  const double tol = 1e-8 * std::max(1.0, std::abs(lambda));
  double coarse_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    const double d = std::abs(nu[j] - nu[nearest]);
    if (d > tol) coarse_gap = std::min(coarse_gap, d);
  }
  auto audit = make_audit("gap_transfer", ref_gap - 1e-8, coarse_gap, inputs);
  audit.inputs.emplace_back("coarse_gap", std::isfinite(coarse_gap) ? coarse_gap : -1.0);
  return audit;
}

}  // namespace fsm

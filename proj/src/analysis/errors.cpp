#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"
#include "fsm/log.hpp"

#include <cmath>
#include <sstream>

namespace fsm {

double epsilon_bound(const FsParams& params, double period, double norm_v_r) {
  const PlanewaveBasis coarse(period, params.M, params.convention);
  const PlanewaveBasis fine(period, params.N, params.convention);
  const double rho_m_r = std::pow(coarse.rho(), -params.r);
  const double ratio = 4.0 * rho_m_r * norm_v_r;
  return std::pow(fine.rho(), -params.r) + rho_m_r * std::pow(ratio, params.K + 1);
}

ErrorRecord compute_errors(const FixedPointResult& fp, const FsParams& params, const FourierPotential& v,
                           const ReferenceSpectrum& reference, const ErrorContext& context) {
  const auto fine_dim = fp.lifted.fine.size();
  const auto ref_dim = static_cast<Eigen::Index>(reference.basis.dimension());
  if (fine_dim > ref_dim) {
    throw ConfigError("compute_errors: the reference cutoff N_e must be at least N");
  }
  if (reference.basis.cutoff() < 2 * params.N) {
    std::ostringstream os;
    os << "reference cutoff N_e = " << reference.basis.cutoff() << " is below 2N = " << 2 * params.N;
    log::warn(os.str());
  }
  const Eigen::Index idx = context.i - 1;
  if (idx < 0 || idx >= static_cast<Eigen::Index>(reference.count)) {
    throw ConfigError("compute_errors: eigenvalue index is outside the reference spectrum");
  }

  ErrorRecord rec;
  rec.params = params;
  rec.i = context.i;
  rec.strategy = fp.strategy.label();
  rec.t = context.t;
  rec.s = context.s;
  rec.lambda_sigma = fp.lambda_sigma;
  rec.scf_count = fp.scf_count;
  rec.converged = fp.converged;
  rec.epsilon_bound = epsilon_bound(params, v.period(), context.norm_v_r);

  const double lambda_star = reference.eigenvalues[idx];
  rec.err_val = std::abs(lambda_star - fp.lambda_sigma);

  CVector lifted = CVector::Zero(ref_dim);
  lifted.head(fine_dim) = fp.lifted.fine;
  const auto [lo, hi] = reference.cluster(idx);
  const auto space = reference.eigenvectors.middleCols(lo, hi - lo);
  const CVector phi = space * (space.adjoint() * lifted);
  if (phi.norm() < 1e-8) {
    throw AlignmentError("compute_errors: the lifted vector has no overlap with the reference eigenspace");
  }
  rec.err_vec = (phi - lifted).norm();

  const auto m = fp.phi_sigma.size();
  const PlanewaveBasis coarse(v.period(), params.M, params.convention);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double symbol = 1.0 + coarse.laplacian_eigenvalue(coarse.frequency(static_cast<std::size_t>(j)));
    acc += std::norm(std::pow(symbol, context.s) * (phi[j] - fp.phi_sigma[j]));
  }
  rec.err_vec_coarse_s = std::sqrt(acc);
  return rec;
}

BoundAudit make_audit(std::string name, double lhs, double rhs, std::vector<std::pair<std::string, double>> inputs) {
  BoundAudit a;
  a.name = std::move(name);
  a.lhs = lhs;
  a.rhs = rhs;
  a.satisfied = lhs <= rhs + 1e-9 * std::abs(rhs);
  a.inputs = std::move(inputs);
  return a;
}

BoundAudit skipped_audit(std::string name, std::string reason, std::vector<std::pair<std::string, double>> inputs) {
  BoundAudit a;
  a.name = std::move(name);
  a.skipped = true;
  a.reason = std::move(reason);
  a.inputs = std::move(inputs);
  return a;
}

std::size_t count_violations(std::span<const BoundAudit> audits) {
  std::size_t n = 0;
  for (const auto& a : audits) n += (!a.skipped && !a.satisfied) ? 1 : 0;
  return n;
}

double coarse_r_norm(const CMatrix& a, const PlanewaveBasis& coarse, double r) {
  const RVector w = regularity_weights(coarse, r);
  return hermitian_norm(hermitian_part(scale_rows_cols(a, w, w)));
}

}  // namespace fsm

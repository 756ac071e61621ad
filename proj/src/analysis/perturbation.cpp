#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fsm {

namespace {

SpectralDecomposition shifted_eig(const CMatrix& h0, double alpha) {
  auto eig = hermitian_eig(h0);
  const double bottom = eig.eigenvalues.minCoeff() + alpha;
  if (!(bottom > 0.0)) {
    std::ostringstream os;
    os << "H0 + alpha is not positive definite (smallest eigenvalue " << bottom << ")";
    throw ConfigError(os.str());
  }
  return eig;
}

double form_norm(const SpectralDecomposition& eig0, const CMatrix& w, double alpha) {
  const CMatrix s = hermitian_function(eig0, [alpha](double e) { return 1.0 / std::sqrt(e + alpha); });
  return hermitian_norm(hermitian_part(s * w * s));
}

}  // namespace

double relative_form_norm(const CMatrix& h0, const CMatrix& w, double alpha) {
  return form_norm(shifted_eig(h0, alpha), w, alpha);
}

std::vector<BoundAudit> perturbation_audit(const CMatrix& h0, const CMatrix& w, double alpha) {
  const auto eig0 = shifted_eig(h0, alpha);
  const double wn = form_norm(eig0, w, alpha);
  const auto eig = hermitian_eig(hermitian_part(h0 + w));
  const auto n = eig0.eigenvalues.size();
  const double scale = std::max(1.0, eig0.eigenvalues.cwiseAbs().maxCoeff());

  std::vector<BoundAudit> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double nu0 = eig0.eigenvalues[i];
    out.push_back(make_audit("eigenvalue_shift", std::abs(eig.eigenvalues[i] - nu0), (nu0 + alpha) * wn,
                             {{"i", static_cast<double>(i + 1)}, {"alpha", alpha}, {"form_norm", wn}}));
  }

  Eigen::Index lo = 0;
  while (lo < n) {
    Eigen::Index hi = lo + 1;
    while (hi < n && eig0.eigenvalues[hi] - eig0.eigenvalues[hi - 1] <= 1e-8 * scale) ++hi;
    const double lambda0 = eig0.eigenvalues.segment(lo, hi - lo).mean();
    double gap = std::numeric_limits<double>::infinity();
    if (lo > 0) gap = std::min(gap, lambda0 - eig0.eigenvalues[lo - 1]);
    if (hi < n) gap = std::min(gap, eig0.eigenvalues[hi] - lambda0);
    const int m = static_cast<int>(hi - lo);
    const double lam_circ = lambda0 + alpha + gap;
    std::vector<std::pair<std::string, double>> inputs = {
        {"lambda0", lambda0}, {"multiplicity", m}, {"gap", gap}, {"alpha", alpha}, {"form_norm", wn}};

    if (std::isfinite(gap) && wn <= 0.5 * gap / (lambda0 + alpha)) {
      std::vector<Eigen::Index> inside;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(eig.eigenvalues[k] - lambda0) <= 0.5 * gap) inside.push_back(k);
      }
      out.push_back(make_audit("isolated_eigenvalue_count", std::abs(static_cast<double>(inside.size()) - m), 0.0,
                               inputs));
      for (auto k : inside) {
        out.push_back(make_audit("isolated_eigenvalue", std::abs(eig.eigenvalues[k] - lambda0),
                                 (lambda0 + alpha) * wn, inputs));
      }
      if (wn <= 0.25 * gap / lam_circ) {
        const CMatrix p0 = eig0.eigenvectors.middleCols(lo, m);
        // (H0 + alpha)^{1/2} restricted to the complement of the cluster.
        const CMatrix root = hermitian_function(eig0, [alpha](double e) { return std::sqrt(e + alpha); });
        for (auto k : inside) {
          const CVector psi = eig.eigenvectors.col(k);
          const CVector psi0 = p0 * (p0.adjoint() * psi);
          const CVector diff = psi0 - psi;
          out.push_back(make_audit("eigenvector_energy", (root * diff).norm(),
                                   4.0 * lam_circ / gap * std::sqrt(lambda0 + alpha) * wn, inputs));
          out.push_back(make_audit("eigenvector", diff.norm(), 4.0 * lam_circ / gap * wn, inputs));
        }
      }
    }
    lo = hi;
  }
  return out;
}

PerturbationSummary perturbation_random_trials(int trials, int dim, std::uint64_t seed) {
  if (trials < 0 || dim < 2) throw ConfigError("perturbation_random_trials: invalid trial parameters");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PerturbationSummary summary;
  summary.trials = static_cast<std::size_t>(trials);
  for (int t = 0; t < trials; ++t) {
    RVector d(dim);
    for (int k = 0; k < dim; ++k) d[k] = -2.0 + 12.0 * u(rng);
    if (t % 4 == 3) d[1] = d[0];
    CMatrix a(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) a(i, j) = cplx(g(rng), g(rng));
    }
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(a).householderQ() * CMatrix::Identity(dim, dim);
    const CMatrix h0 = hermitian_part(q * d.cast<cplx>().asDiagonal() * q.adjoint());
    CMatrix b(dim, dim);
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) b(i, j) = cplx(g(rng), g(rng));
    }
    const CMatrix w0 = hermitian_part(b);
    // Perturbation sizes log-uniform over four decades.
    const double eps = std::pow(10.0, -4.0 + 4.0 * u(rng)) / hermitian_norm(w0);
    const CMatrix w = eps * w0;
    const double alpha = std::max(1.0, 1.0 - d.minCoeff());
    const auto audits = perturbation_audit(h0, w, alpha);
    for (const auto& au : audits) {
      ++summary.audits;
      if (au.name == "isolated_eigenvalue") ++summary.eigenvalue_checks;
      if (au.name == "eigenvector") ++summary.eigenvector_checks;
      if (!au.skipped && !au.satisfied) {
        ++summary.violations;
        summary.failures.push_back(au);
      }
    }
  }
  return summary;
}

}  // namespace fsm

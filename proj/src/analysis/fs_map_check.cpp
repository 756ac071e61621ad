#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"
#include "fsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fsm {

namespace {

// Complement eigenvalues closer than this (relative to ||H||) make H_perp - lambda
// too ill-conditioned for a 1e-9 check.
constexpr double kSolvableMargin = 1e-4;

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = cplx(g(rng), g(rng));
  }
  return hermitian_part(a);
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

}  // namespace

FsMapReport fs_map_check(const CMatrix& h, int coarse_dim, double tol) {
  const auto n = h.rows();
  if (h.cols() != n) throw ConfigError("fs_map_check: matrix is not square");
  if (coarse_dim < 1 || coarse_dim >= n) throw ConfigError("fs_map_check: coarse_dim must lie in [1, n)");
  const auto eig = hermitian_eig(h);
  const double scale = std::max(1.0, hermitian_norm(h));
  const Eigen::Index c = coarse_dim;
  const Eigen::Index p = n - c;
  const CMatrix h_pp = h.topLeftCorner(c, c);
  const CMatrix h_pq = h.topRightCorner(c, p);
  const CMatrix h_qq = h.bottomRightCorner(p, p);
  const auto perp = hermitian_eig(h_qq);

  FsMapReport report;
  Eigen::Index lo = 0;
  while (lo < n) {
    Eigen::Index hi = lo + 1;
    while (hi < n && eig.eigenvalues[hi] - eig.eigenvalues[hi - 1] <= 1e-8 * scale) ++hi;
    FsMapEigenCheck chk;
    chk.lambda = eig.eigenvalues.segment(lo, hi - lo).mean();
    chk.multiplicity = static_cast<int>(hi - lo);
    chk.complement_distance = (perp.eigenvalues.array() - chk.lambda).abs().minCoeff();
    chk.solvable = chk.complement_distance > kSolvableMargin * scale;
    if (chk.solvable) {
      // (H_perp - lambda)^{-1} through the complement eigenbasis.
      const CMatrix inv = hermitian_function(perp, [&](double e) { return 1.0 / (e - chk.lambda); });
      CMatrix f = h_pp - h_pq * inv * h_pq.adjoint();
      f.diagonal().array() -= chk.lambda;
      const RVector sv = Eigen::BDCSVD<CMatrix>(f).singularValues();
      chk.smallest_singular = sv.minCoeff() / scale;
      for (Eigen::Index k = 0; k < sv.size(); ++k) chk.nullity += sv[k] <= tol * scale ? 1 : 0;
      for (Eigen::Index k = lo; k < hi; ++k) {
        const CVector psi = eig.eigenvectors.col(k);
        CVector rebuilt(n);
        rebuilt.head(c) = psi.head(c);
        rebuilt.tail(p) = -(inv * (h_pq.adjoint() * psi.head(c)));
        chk.reconstruction_error = std::max(chk.reconstruction_error, (rebuilt - psi).norm());
      }
      chk.pass = chk.smallest_singular <= tol && chk.nullity == chk.multiplicity && chk.reconstruction_error <= tol;
      ++report.solvable;
      report.passed += chk.pass ? 1 : 0;
    }
    report.checks.push_back(chk);
    lo = hi;
  }
  return report;
}

FsMapTrialSummary fs_map_random_trials(int trials, std::uint64_t seed, int min_dim, int max_dim, int max_coarse,
                                       double tol) {
  if (trials < 0 || min_dim < 2 || max_dim < min_dim || max_coarse < 1) {
    throw ConfigError("fs_map_random_trials: invalid trial parameters");
  }
  std::mt19937_64 rng(seed);
  FsMapTrialSummary summary;
  summary.trials = static_cast<std::size_t>(trials);
  for (int t = 0; t < trials; ++t) {
    const int n = std::uniform_int_distribution<int>(min_dim, max_dim)(rng);
    const bool degenerate = t % 3 == 2;
    const int lowest_coarse = degenerate ? std::min(2, n - 1) : 1;
    const int c = std::uniform_int_distribution<int>(lowest_coarse, std::max(lowest_coarse, std::min(max_coarse, n - 1)))(rng);
    CMatrix h;
    if (degenerate) {
      std::uniform_real_distribution<double> u(-5.0, 5.0);
      RVector d(n);
      for (int k = 0; k < n; ++k) d[k] = u(rng);
      d[1] = d[0];
      const CMatrix q = random_unitary(n, rng);
      h = hermitian_part(q * d.cast<cplx>().asDiagonal() * q.adjoint());
    } else {
      h = random_hermitian(n, rng);
    }
    auto report = fs_map_check(h, c, tol);
    summary.solvable += report.solvable;
    summary.passed += report.passed;
    for (const auto& chk : report.checks) summary.degenerate_checks += (chk.solvable && chk.multiplicity > 1) ? 1 : 0;
    summary.reports.push_back(std::move(report));
  }
  return summary;
}

}  // namespace fsm

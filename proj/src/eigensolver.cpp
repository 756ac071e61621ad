#include "fsm/eigensolver.hpp"

#include "fsm/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fsm {
namespace {

constexpr double kClusterTol = 1e-8;
constexpr double kDegenerateTol = 1e-10;
constexpr double kTieTol = 1e-12;

bool same_cluster(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(a)); }

struct Selection {
  double value;
  CVector vector;
};

Eigen::Index select_index(const RVector& values, const Strategy& s) {
  const Eigen::Index n = values.size();
  if (s.kind == StrategyKind::ByIndex) {
    if (s.index < 1 || s.index > n) {
      std::ostringstream os;
      os << "eigenvalue index " << s.index << " is outside the coarse dimension " << n;
      throw ConfigError(os.str());
    }
    return s.index - 1;
  }
  // Closest to the target; equidistant candidates resolve to the smaller one,
  // which comes first in ascending order.
  Eigen::Index best = 0;
  double best_dist = std::abs(values[0] - s.target);
  const double tie = kTieTol * std::max(1.0, std::abs(s.target));
  for (Eigen::Index j = 1; j < n; ++j) {
    const double d = std::abs(values[j] - s.target);
    if (d < best_dist - tie) {
      best = j;
      best_dist = d;
    }
  }
  return best;
}

// Picks the eigenpair for the strategy. Inside a degenerate cluster the vector
// with maximal overlap with `previous` is used, so the branch stays continuous.
Selection select(const SpectralDecomposition& eig, const Strategy& s, const CVector* previous) {
  const Eigen::Index j = select_index(eig.eigenvalues, s);
  const double value = eig.eigenvalues[j];
  Selection out{value, eig.eigenvectors.col(j)};
  if (previous == nullptr) return out;

  Eigen::Index lo = j, hi = j + 1;
  while (lo > 0 && same_cluster(value, eig.eigenvalues[lo - 1], kDegenerateTol)) --lo;
  while (hi < eig.eigenvalues.size() && same_cluster(value, eig.eigenvalues[hi], kDegenerateTol)) ++hi;
  if (hi - lo > 1) {
    const auto block = eig.eigenvectors.middleCols(lo, hi - lo);
    const CVector projected = block * (block.adjoint() * *previous);
    if (projected.norm() > 1e-8) out.vector = projected.normalized();
  }
  const cplx overlap = previous->dot(out.vector);
  if (std::abs(overlap) > 0.0) out.vector *= std::conj(overlap) / std::abs(overlap);
  return out;
}

}  // namespace

std::pair<Eigen::Index, Eigen::Index> ReferenceSpectrum::cluster(Eigen::Index i) const {
  Eigen::Index lo = i, hi = i + 1;
  while (lo > 0 && same_cluster(eigenvalues[i], eigenvalues[lo - 1], kClusterTol)) --lo;
  while (hi < eigenvalues.size() && same_cluster(eigenvalues[i], eigenvalues[hi], kClusterTol)) ++hi;
  return {lo, hi};
}

ReferenceSpectrum reference_solve(const FourierPotential& v, int n_exact, std::size_t count,
                                  CutoffConvention convention) {
  const PlanewaveBasis basis(v.period(), n_exact, convention);
  if (count == 0 || count > basis.dimension()) {
    std::ostringstream os;
    os << "reference_solve: count " << count << " must be in [1, " << basis.dimension() << "]";
    throw ConfigError(os.str());
  }
  CMatrix h = potential_block(v, basis, basis);
  h.diagonal() += laplacian_diagonal(basis).cast<cplx>();
  SpectralDecomposition eig = hermitian_eig(h);

  ReferenceSpectrum ref{basis, std::move(eig.eigenvalues), {}, {}, count};
  const auto last = static_cast<Eigen::Index>(count) - 1;
  const Eigen::Index keep = ref.cluster(last).second;
  ref.eigenvectors = eig.eigenvectors.leftCols(keep);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(count); ++i) {
    const auto [lo, hi] = ref.cluster(i);
    double gap = std::numeric_limits<double>::infinity();
    if (lo > 0) gap = std::min(gap, ref.eigenvalues[i] - ref.eigenvalues[lo - 1]);
    if (hi < ref.eigenvalues.size()) gap = std::min(gap, ref.eigenvalues[hi] - ref.eigenvalues[i]);
    ref.gaps.push_back(gap);
  }
  return ref;
}

std::string Strategy::label() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == StrategyKind::ByIndex) {
    os << "index:" << index;
  } else {
    os << "target:" << target;
  }
  return os.str();
}

FixedPointResult solve_fixed_point(const CoarseProblem& problem, const Strategy& strategy,
                                   const FixedPointOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("fixed point: tol must be positive");
  if (options.max_iter < 1) throw ConfigError("fixed point: max_iter must be >= 1");
  const double limit = problem.lambda_limit();

  const SpectralDecomposition galerkin = hermitian_eig(problem.galerkin_hamiltonian());
  Selection current = select(galerkin, strategy, nullptr);

  FixedPointResult result;
  result.strategy = strategy;
  double lambda = options.lambda0.value_or(current.value);
  result.initial_guess = lambda;
  if (!(lambda < limit)) {
    std::ostringstream os;
    os.precision(17);
    os << "fixed point: initial guess " << lambda << " is not below the guard " << limit;
    throw DomainError(os.str());
  }
  result.iterates.push_back(lambda);

  for (int it = 0; it < options.max_iter; ++it) {
    const SpectralDecomposition eig = hermitian_eig(problem.hamiltonian(lambda));
    current = select(eig, strategy, &current.vector);
    const double next = current.value;
    result.iterates.push_back(next);
    if (!(next < limit)) {
      std::ostringstream os;
      os.precision(17);
      os << "fixed point: iterate " << next << " left the domain lambda < " << limit;
      throw DomainError(os.str());
    }
    const double increment = std::abs(next - lambda);
    lambda = next;
    if (increment < options.tol) {
      result.converged = true;
      break;
    }
  }

  result.scf_count = static_cast<int>(result.iterates.size()) - 1;
  result.lambda_sigma = lambda;
  const CMatrix h = problem.hamiltonian(lambda);
  const Selection final_pair = select(hermitian_eig(h), strategy, &current.vector);
  result.selected_eigenvalue = final_pair.value;
  result.phi_sigma = final_pair.vector;
  result.residual = (h * result.phi_sigma - lambda * result.phi_sigma).norm();
  result.lifted = problem.lift(lambda, result.phi_sigma);
  return result;
}

FixedPointResult fixed_point_by_index(const CoarseProblem& problem, int i, const FixedPointOptions& options) {
  return solve_fixed_point(problem, Strategy::by_index(i), options);
}

FixedPointResult fixed_point_by_target(const CoarseProblem& problem, double target,
                                       const FixedPointOptions& options) {
  return solve_fixed_point(problem, Strategy::by_target(target), options);
}

FixedPointResult fixed_point_by_index(const FsParams& params, const FourierPotential& v, int i,
                                      const FixedPointOptions& options) {
  return fixed_point_by_index(FeshbachSchurOperator(params, v), i, options);
}

FixedPointResult fixed_point_by_target(const FsParams& params, const FourierPotential& v, double target,
                                       const FixedPointOptions& options) {
  return fixed_point_by_target(FeshbachSchurOperator(params, v), target, options);
}

}  // namespace fsm

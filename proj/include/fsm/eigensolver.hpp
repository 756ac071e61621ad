#pragma once

#include "fsm/fs_operator.hpp"
#include "fsm/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fsm {

// Variational eigenpairs of P_{N_e}(-Delta + V)P_{N_e}.
struct ReferenceSpectrum {
  PlanewaveBasis basis;
  RVector eigenvalues;           // whole computed spectrum, ascending
  CMatrix eigenvectors;          // first `vectors` columns (complete clusters)
  std::vector<double> gaps;      // gaps[i]: distance of eigenvalue i to the rest of the spectrum
  std::size_t count = 0;         // number of eigenpairs requested

  // Half-open index range of the cluster containing eigenvalue i (0-based);
  // eigenvalues within 1e-8 relative are one cluster.
  std::pair<Eigen::Index, Eigen::Index> cluster(Eigen::Index i) const;
};

ReferenceSpectrum reference_solve(const FourierPotential& v, int n_exact, std::size_t count,
                                  CutoffConvention convention = CutoffConvention::StrictlyBelow);

enum class StrategyKind { ByIndex, ByTarget };

struct Strategy {
  StrategyKind kind = StrategyKind::ByIndex;
  int index = 1;        // 1-based, ByIndex
  double target = 0.0;  // ByTarget

  static Strategy by_index(int i) { return {StrategyKind::ByIndex, i, 0.0}; }
  static Strategy by_target(double t) { return {StrategyKind::ByTarget, 0, t}; }
  std::string label() const;
};

struct FixedPointOptions {
  double tol = 1e-12;
  int max_iter = 50;
  // Defaults to the selected Galerkin eigenvalue of H_M.
  std::optional<double> lambda0;
};

struct FixedPointResult {
  double lambda_sigma = 0.0;
  CVector phi_sigma;            // normalized, on X_M
  LiftedVector lifted;          // Q(lambda_sigma) phi_sigma
  std::vector<double> iterates; // lambda^(0), lambda^(1), ...
  int scf_count = 0;            // iterates.size() - 1
  Strategy strategy;
  bool converged = false;
  double initial_guess = 0.0;
  double selected_eigenvalue = 0.0;  // selected eigenvalue of H(lambda_sigma)
  double residual = 0.0;             // ||(H(lambda_sigma) - lambda_sigma) phi_sigma||
};

// lambda^(k) = selected eigenvalue of H(lambda^(k-1)) until the increment is
// below tol. Non-convergence is reported through `converged`; an iterate at or
// above problem.lambda_limit() throws DomainError.
FixedPointResult solve_fixed_point(const CoarseProblem& problem, const Strategy& strategy,
                                   const FixedPointOptions& options = {});

FixedPointResult fixed_point_by_index(const CoarseProblem& problem, int i, const FixedPointOptions& options = {});
FixedPointResult fixed_point_by_target(const CoarseProblem& problem, double target,
                                       const FixedPointOptions& options = {});

FixedPointResult fixed_point_by_index(const FsParams& params, const FourierPotential& v, int i,
                                      const FixedPointOptions& options = {});
FixedPointResult fixed_point_by_target(const FsParams& params, const FourierPotential& v, double target,
                                       const FixedPointOptions& options = {});

}  // namespace fsm

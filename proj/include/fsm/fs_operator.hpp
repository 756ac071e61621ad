#pragma once

// Feshbach-Schur effective operators on the coarse space X_M.
//
//   G(lambda)   = (-Delta - lambda)^{-1} on the window X_N (-) X_M
//   R_sigma     = sum_{k=0}^{K} (-1)^k [G V_window]^k G
//   U_sigma     = -P_M V P_window R_sigma P_window V P_M
//   H_sigma     = H_M + U_sigma(lambda)
//   Q_sigma     = 1 - R_sigma P_window V P_M          (lifting to X_N)
//
// U_M(lambda), the exact Schur complement with P_M^perp truncated at a large
// cutoff N_e, is provided by SchurComplementOracle.

#include "fsm/planewave.hpp"

#include <limits>
#include <memory>

namespace fsm {

struct FsParams {
  int M = 1;   // coarse cutoff
  int N = 1;   // fine cutoff
  int K = 0;   // Neumann truncation order
  double r = 1.0;
  double alpha = 1.0;
  CutoffConvention convention = CutoffConvention::StrictlyBelow;

  // Throws ConfigError unless N >= M >= 1, K >= 0, r >= 0, alpha >= 0.
  void validate() const;
};

struct EffectiveOperator {
  double lambda = 0.0;
  CMatrix h_coarse;   // H_M
  CMatrix u_sigma;    // U_sigma(lambda), symmetrized
  IndexWindow window;
  double asymmetry = 0.0;  // of U_sigma before symmetrization, relative

  CMatrix matrix() const { return h_coarse + u_sigma; }
};

struct LiftedVector {
  CVector coarse;  // on X_M
  CVector fine;    // on X_N; leading dim(X_M) entries equal `coarse`
};

// (-Delta - lambda)^{-1} on the window, as its diagonal. Throws
// SingularResolventError if lambda hits a window eigenvalue (1e-12 relative).
RVector windowed_resolvent(const IndexWindow& window, double lambda);

// Truncated Neumann series of the windowed resolvent of -Delta + V.
class ResolventSeries {
 public:
  ResolventSeries(const IndexWindow& window, const FourierPotential& v);

  const IndexWindow& window() const noexcept { return window_; }
  const CMatrix& window_potential() const noexcept { return v_window_; }

  // R_sigma(lambda) * block, block has window-many rows.
  CMatrix apply(double lambda, int order, const CMatrix& block) const;
  // R_sigma(lambda) as a dense matrix.
  CMatrix matrix(double lambda, int order) const;

 private:
  IndexWindow window_;
  RVector laplacian_;
  CMatrix v_window_;
};

CMatrix neumann_series(const IndexWindow& window, const FourierPotential& v, double lambda, int order);

// A coarse problem H_M + U(lambda) whose eigenvalue equation is nonlinear in
// lambda. Implemented by the truncated (FeshbachSchurOperator) and the
// quasi-exact (SchurComplementOracle) effective interactions.
class CoarseProblem {
 public:
  virtual ~CoarseProblem() = default;

  virtual const PlanewaveBasis& coarse_basis() const = 0;
  virtual const CMatrix& galerkin_hamiltonian() const = 0;
  // U(lambda), Hermitian.
  virtual CMatrix interaction(double lambda) const = 0;
  // lambda must stay strictly below this value.
  virtual double lambda_limit() const = 0;
  virtual LiftedVector lift(double lambda, const CVector& coarse) const = 0;

  CMatrix hamiltonian(double lambda) const { return galerkin_hamiltonian() + interaction(lambda); }
};

// Blocks of the sigma = (N, M, K) effective operator for one potential.
class FeshbachSchurOperator final : public CoarseProblem {
 public:
  FeshbachSchurOperator(const FsParams& params, const FourierPotential& v);

  const FsParams& params() const noexcept { return params_; }
  const PlanewaveBasis& coarse_basis() const override { return coarse_; }
  const PlanewaveBasis& fine_basis() const noexcept { return fine_; }
  const IndexWindow& window() const noexcept { return series_.window(); }
  const CMatrix& galerkin_hamiltonian() const override { return h_coarse_; }
  // P_window V P_M, window-many rows.
  const CMatrix& coupling() const noexcept { return coupling_; }

  // rho_M minus a 1e-9 relative margin (the window's lower Laplacian edge);
  // +inf when N = M.
  double lambda_limit() const override;

  CMatrix interaction(double lambda) const override;
  EffectiveOperator assemble(double lambda) const;
  LiftedVector lift(double lambda, const CVector& coarse) const override;

 private:
  void check_lambda(double lambda) const;

  FsParams params_;
  PlanewaveBasis coarse_;
  PlanewaveBasis fine_;
  ResolventSeries series_;
  CMatrix h_coarse_;
  CMatrix coupling_;
};

CMatrix effective_interaction(const FsParams& params, const FourierPotential& v, double lambda);
EffectiveOperator coarse_hamiltonian(const FsParams& params, const FourierPotential& v, double lambda);
LiftedVector lift(const FsParams& params, const FourierPotential& v, double lambda, const CVector& coarse);

// U_M(lambda) = -P_M V P_perp (H_perp - lambda)^{-1} P_perp V P_M with P_perp
// truncated to the window X_{N_e} (-) X_M. The window Hamiltonian is
// diagonalized once; every lambda is then a diagonal solve.
class SchurComplementOracle final : public CoarseProblem {
 public:
  SchurComplementOracle(int M, int n_exact, const FourierPotential& v,
                        CutoffConvention convention = CutoffConvention::StrictlyBelow);

  const PlanewaveBasis& coarse_basis() const override { return coarse_; }
  const PlanewaveBasis& fine_basis() const noexcept { return fine_; }
  const IndexWindow& window() const noexcept { return window_; }
  const CMatrix& galerkin_hamiltonian() const override { return h_coarse_; }

  // Smallest eigenvalue of the windowed H_perp.
  double complement_bottom() const noexcept { return bottom_; }
  double lambda_limit() const override { return bottom_; }

  // Throws NearSingularError when lambda is not below the complement spectrum.
  CMatrix interaction(double lambda) const override;
  // dU_M/dlambda in closed form.
  CMatrix interaction_derivative(double lambda) const;
  LiftedVector lift(double lambda, const CVector& coarse) const override;

 private:
  RVector shifted_inverse(double lambda, int power) const;

  PlanewaveBasis coarse_;
  PlanewaveBasis fine_;
  IndexWindow window_;
  CMatrix h_coarse_;
  RVector energies_;
  CMatrix vectors_;
  CMatrix projected_coupling_;  // vectors^* P_window V P_M
  double bottom_ = std::numeric_limits<double>::infinity();
};

CMatrix schur_exact_interaction(int M, int n_exact, const FourierPotential& v, double lambda,
                                CutoffConvention convention = CutoffConvention::StrictlyBelow);

}  // namespace fsm

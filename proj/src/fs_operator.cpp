#include "fsm/fs_operator.hpp"

#include "fsm/errors.hpp"
#include "fsm/kernels.hpp"
#include "fsm/linalg.hpp"
#include "fsm/log.hpp"

#include <cmath>
#include <sstream>

namespace fsm {

namespace {

constexpr double kGuardMargin = 1e-9;
constexpr double kAsymmetryTripwire = 1e-12;

std::span<cplx> column(CMatrix& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

}  // namespace

void FsParams::validate() const {
  std::ostringstream os;
  if (M < 1) os << "M must be >= 1 (got " << M << "); ";
  if (N < M) os << "N must be >= M (got N = " << N << ", M = " << M << "); ";
  if (K < 0) os << "K must be >= 0 (got " << K << "); ";
  if (!(r >= 0.0)) os << "r must be >= 0; ";
  if (!(alpha >= 0.0)) os << "alpha must be >= 0; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw ConfigError("FsParams: " + msg.substr(0, msg.size() - 2));
}

RVector windowed_resolvent(const IndexWindow& window, double lambda) {
  RVector g(static_cast<Eigen::Index>(window.dimension()));
  for (std::size_t j = 0; j < window.dimension(); ++j) {
    const double e = window.hi().laplacian_eigenvalue(window.frequency(j));
    const double gap = e - lambda;
    if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(e))) {
      std::ostringstream os;
      os << "windowed resolvent is singular: lambda = " << lambda << " equals the Laplacian eigenvalue of mode k = "
         << window.frequency(j);
      throw SingularResolventError(os.str());
    }
    g[static_cast<Eigen::Index>(j)] = 1.0 / gap;
  }
  return g;
}

ResolventSeries::ResolventSeries(const IndexWindow& window, const FourierPotential& v)
    : window_(window), v_window_(potential_block(v, window, window)) {
  laplacian_.resize(static_cast<Eigen::Index>(window.dimension()));
  for (std::size_t j = 0; j < window.dimension(); ++j) {
    laplacian_[static_cast<Eigen::Index>(j)] = window.hi().laplacian_eigenvalue(window.frequency(j));
  }
}

CMatrix ResolventSeries::apply(double lambda, int order, const CMatrix& block) const {
  const auto n = static_cast<Eigen::Index>(window_.dimension());
  if (block.rows() != n) throw ConfigError("ResolventSeries::apply: block has the wrong number of rows");
  if (order < 0) throw ConfigError("ResolventSeries::apply: order must be >= 0");
  const RVector g = windowed_resolvent(window_, lambda);
  const std::span<const double> gs(g.data(), static_cast<std::size_t>(n));
  const auto& kern = kernels::active();

  // term_k = (-G W)^k G block, accumulated left to right.
  CMatrix term = block;
  for (Eigen::Index j = 0; j < term.cols(); ++j) kern.scale_real(gs, 1.0, column(term, j));
  CMatrix sum = term;
  CMatrix next(n, block.cols());
  for (int k = 1; k <= order; ++k) {
    kern.gemm_block(v_window_.data(), static_cast<std::size_t>(n), term.data(),
                    static_cast<std::size_t>(term.cols()), next.data());
    for (Eigen::Index j = 0; j < next.cols(); ++j) {
      kern.scale_real(gs, -1.0, column(next, j));
      const std::span<const cplx> src(next.col(j).data(), static_cast<std::size_t>(n));
      kern.axpy(cplx(1.0), src, column(sum, j));
    }
    term.swap(next);
  }
  return sum;
}

CMatrix ResolventSeries::matrix(double lambda, int order) const {
  const auto n = static_cast<Eigen::Index>(window_.dimension());
  return apply(lambda, order, CMatrix::Identity(n, n));
}

CMatrix neumann_series(const IndexWindow& window, const FourierPotential& v, double lambda, int order) {
  return ResolventSeries(window, v).matrix(lambda, order);
}

FeshbachSchurOperator::FeshbachSchurOperator(const FsParams& params, const FourierPotential& v)
    : params_((params.validate(), params)),
      coarse_(v.period(), params.M, params.convention),
      fine_(v.period(), params.N, params.convention),
      series_(IndexWindow(coarse_, fine_), v),
      h_coarse_(potential_block(v, coarse_, coarse_)),
      coupling_(potential_block(v, series_.window(), coarse_)) {
  h_coarse_.diagonal() += laplacian_diagonal(coarse_).cast<cplx>();
}

double FeshbachSchurOperator::lambda_limit() const {
  if (window().empty()) return std::numeric_limits<double>::infinity();
  const double edge = window().lower_edge();
  return edge - kGuardMargin * std::abs(edge);
}

void FeshbachSchurOperator::check_lambda(double lambda) const {
  if (!(lambda < lambda_limit())) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda = " << lambda << " is not below the window edge guard " << lambda_limit();
    throw DomainError(os.str());
  }
}

CMatrix FeshbachSchurOperator::interaction(double lambda) const { return assemble(lambda).u_sigma; }

EffectiveOperator FeshbachSchurOperator::assemble(double lambda) const {
  const auto m = static_cast<Eigen::Index>(coarse_.dimension());
  EffectiveOperator op{lambda, h_coarse_, CMatrix::Zero(m, m), window(), 0.0};
  if (window().empty()) return op;
  check_lambda(lambda);
  const CMatrix image = series_.apply(lambda, params_.K, coupling_);
  const CMatrix u = -(coupling_.adjoint() * image);
  op.asymmetry = hermitian_asymmetry(u);
  if (op.asymmetry > kAsymmetryTripwire) {
    std::ostringstream os;
    os << "U_sigma asymmetry " << op.asymmetry << " exceeds " << kAsymmetryTripwire << " before symmetrization";
    log::warn(os.str());
  }
  op.u_sigma = hermitian_part(u);
  return op;
}

LiftedVector FeshbachSchurOperator::lift(double lambda, const CVector& coarse) const {
  const auto m = static_cast<Eigen::Index>(coarse_.dimension());
  if (coarse.size() != m) throw ConfigError("lift: coarse vector has the wrong dimension");
  LiftedVector out{coarse, CVector::Zero(static_cast<Eigen::Index>(fine_.dimension()))};
  out.fine.head(m) = coarse;
  if (window().empty()) return out;
  check_lambda(lambda);
  const CMatrix rhs = coupling_ * coarse;
  out.fine.tail(static_cast<Eigen::Index>(window().dimension())) = -series_.apply(lambda, params_.K, rhs).col(0);
  return out;
}

CMatrix effective_interaction(const FsParams& params, const FourierPotential& v, double lambda) {
  return FeshbachSchurOperator(params, v).interaction(lambda);
}

EffectiveOperator coarse_hamiltonian(const FsParams& params, const FourierPotential& v, double lambda) {
  return FeshbachSchurOperator(params, v).assemble(lambda);
}

LiftedVector lift(const FsParams& params, const FourierPotential& v, double lambda, const CVector& coarse) {
  return FeshbachSchurOperator(params, v).lift(lambda, coarse);
}

SchurComplementOracle::SchurComplementOracle(int M, int n_exact, const FourierPotential& v,
                                             CutoffConvention convention)
    : coarse_(v.period(), M, convention),
      fine_(v.period(), n_exact, convention),
      window_(coarse_, fine_),
      h_coarse_(potential_block(v, coarse_, coarse_)) {
  h_coarse_.diagonal() += laplacian_diagonal(coarse_).cast<cplx>();
  if (window_.empty()) return;
  CMatrix h_perp = potential_block(v, window_, window_);
  for (std::size_t j = 0; j < window_.dimension(); ++j) {
    h_perp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) +=
        fine_.laplacian_eigenvalue(window_.frequency(j));
  }
  SpectralDecomposition eig = hermitian_eig(h_perp);
  energies_ = std::move(eig.eigenvalues);
  vectors_ = std::move(eig.eigenvectors);
  projected_coupling_ = vectors_.adjoint() * potential_block(v, window_, coarse_);
  bottom_ = energies_[0];
}

RVector SchurComplementOracle::shifted_inverse(double lambda, int power) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(bottom_));
  if (!(lambda < bottom_ - tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "Schur complement: H_perp - lambda is not positive definite at lambda = " << lambda
       << "; smallest eigenvalue of the windowed H_perp is " << bottom_;
    throw NearSingularError(os.str(), bottom_);
  }
  RVector d(energies_.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = std::pow(energies_[j] - lambda, -power);
  return d;
}

CMatrix SchurComplementOracle::interaction(double lambda) const {
  const auto m = static_cast<Eigen::Index>(coarse_.dimension());
  if (window_.empty()) return CMatrix::Zero(m, m);
  const RVector d = shifted_inverse(lambda, 1);
  return hermitian_part(-(projected_coupling_.adjoint() * d.asDiagonal() * projected_coupling_));
}

CMatrix SchurComplementOracle::interaction_derivative(double lambda) const {
  const auto m = static_cast<Eigen::Index>(coarse_.dimension());
  if (window_.empty()) return CMatrix::Zero(m, m);
  const RVector d = shifted_inverse(lambda, 2);
  return hermitian_part(-(projected_coupling_.adjoint() * d.asDiagonal() * projected_coupling_));
}

LiftedVector SchurComplementOracle::lift(double lambda, const CVector& coarse) const {
  const auto m = static_cast<Eigen::Index>(coarse_.dimension());
  if (coarse.size() != m) throw ConfigError("lift: coarse vector has the wrong dimension");
  LiftedVector out{coarse, CVector::Zero(static_cast<Eigen::Index>(fine_.dimension()))};
  out.fine.head(m) = coarse;
  if (window_.empty()) return out;
  const RVector d = shifted_inverse(lambda, 1);
  out.fine.tail(static_cast<Eigen::Index>(window_.dimension())) =
      -(vectors_ * (d.asDiagonal() * (projected_coupling_ * coarse)));
  return out;
}

CMatrix schur_exact_interaction(int M, int n_exact, const FourierPotential& v, double lambda,
                                CutoffConvention convention) {
  return SchurComplementOracle(M, n_exact, v, convention).interaction(lambda);
}

}  // namespace fsm

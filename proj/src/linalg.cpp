#include "fsm/linalg.hpp"

#include "fsm/errors.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fsm {
namespace {

constexpr double kHermitianTol = 1e-12;

bool has_imaginary_part(const CMatrix& a) {
  const double* p = reinterpret_cast<const double*>(a.data());
  const Eigen::Index n = a.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p[2 * i + 1] != 0.0) return true;
  }
  return false;
}

void require_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw ContractViolation("hermitian_eig: matrix is not square");
  }
  const double asym = hermitian_asymmetry(a);
  if (asym > kHermitianTol) {
    std::ostringstream os;
    os << "hermitian_eig: input is not Hermitian (relative asymmetry " << asym << ")";
    throw ContractViolation(os.str());
  }
}

void fix_phases(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) best = std::max(best, std::abs(v(i, j)));
    if (best == 0.0) continue;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) >= best * (1.0 - 1e-10)) {
        const cplx phase = std::conj(v(i, j)) / std::abs(v(i, j));
        v.col(j) *= phase;
        v(i, j) = std::abs(v(i, j));
        break;
      }
    }
  }
}

void check_info(lapack_int info, const char* routine) {
  if (info != 0) {
    std::ostringstream os;
    os << routine << " failed with info = " << info;
    throw Error(os.str());
  }
}

}  // namespace

double hermitian_asymmetry(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

SpectralDecomposition hermitian_eig(const CMatrix& a) {
  require_hermitian(a);
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  if (n == 0) {
    out.eigenvectors.resize(0, 0);
    return out;
  }
  if (!has_imaginary_part(a)) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, out.eigenvalues.data()),
               "dsyevd");
    out.eigenvectors = work.cast<cplx>();
  } else {
    CMatrix work = hermitian_part(a);
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, work.data(), n, out.eigenvalues.data()),
               "zheevd");
    out.eigenvectors = std::move(work);
  }
  fix_phases(out.eigenvectors);
  return out;
}

RVector hermitian_eigenvalues(const CMatrix& a) {
  require_hermitian(a);
  const lapack_int n = static_cast<lapack_int>(a.rows());
  RVector w(n);
  if (n == 0) return w;
  if (!has_imaginary_part(a)) {
    Eigen::MatrixXd work = a.real();
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "dsyevd");
  } else {
    CMatrix work = hermitian_part(a);
    check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data()), "zheevd");
  }
  return w;
}

double hermitian_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  const RVector w = hermitian_eigenvalues(a);
  return std::max(std::abs(w[0]), std::abs(w[w.size() - 1]));
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues()[0];
}

CMatrix scale_rows_cols(const CMatrix& a, const RVector& left, const RVector& right) {
  return left.asDiagonal() * a * right.asDiagonal();
}

}  // namespace fsm

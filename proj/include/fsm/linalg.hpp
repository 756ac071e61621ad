#pragma once

#include "fsm/planewave.hpp"

namespace fsm {

// Eigenvalues ascending; eigenvectors orthonormal columns. Each column's phase
// is fixed so that its first largest-magnitude entry is real and positive.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;
};

// Dense Hermitian eigendecomposition (LAPACK ?syevd/?heevd; the real routine
// is used when the input has no imaginary part). Throws ContractViolation if
// `a` is not Hermitian within 1e-12 relative.
SpectralDecomposition hermitian_eig(const CMatrix& a);
RVector hermitian_eigenvalues(const CMatrix& a);

// max |a - a^*| / max(1e-300, max |a|)
double hermitian_asymmetry(const CMatrix& a);

CMatrix hermitian_part(const CMatrix& a);

// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
double hermitian_norm(const CMatrix& a);

// Largest singular value of a general matrix.
double spectral_norm(const CMatrix& a);

// diag(left) * a * diag(right)
CMatrix scale_rows_cols(const CMatrix& a, const RVector& left, const RVector& right);

// Orthonormal eigenvectors of `a` and the spectral function f applied to it:
// V diag(f(lambda)) V^*.
template <class F>
CMatrix hermitian_function(const SpectralDecomposition& eig, F&& f) {
  const auto n = eig.eigenvalues.size();
  RVector fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv[i] = f(eig.eigenvalues[i]);
  return eig.eigenvectors * fv.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace fsm

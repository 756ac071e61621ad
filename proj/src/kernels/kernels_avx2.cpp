// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may run before dispatch has checked cpuid.

#include "fsm/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace fsm::kernels {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

// [xr, xi, ...] * (ar + i ai) with two complex numbers per register.
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, swapped));
}

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = x.size();
  const double* xp = raw(x.data());
  double* yp = raw(y.data());
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * k);
    const __m256d x1 = _mm256_loadu_pd(xp + 2 * k + 4);
    __m256d y0 = _mm256_loadu_pd(yp + 2 * k);
    __m256d y1 = _mm256_loadu_pd(yp + 2 * k + 4);
    y0 = _mm256_add_pd(y0, cmul(ar, ai, x0));
    y1 = _mm256_add_pd(y1, cmul(ar, ai, x1));
    _mm256_storeu_pd(yp + 2 * k, y0);
    _mm256_storeu_pd(yp + 2 * k + 4, y1);
  }
  for (; k + 2 <= n; k += 2) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * k);
    __m256d y0 = _mm256_loadu_pd(yp + 2 * k);
    y0 = _mm256_add_pd(y0, cmul(ar, ai, x0));
    _mm256_storeu_pd(yp + 2 * k, y0);
  }
  for (; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = cplx(y[k].real() + a.real() * xr - a.imag() * xi,
                y[k].imag() + a.real() * xi + a.imag() * xr);
  }
}

cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  const std::size_t n = x.size();
  const double* xp = raw(x.data());
  const double* yp = raw(y.data());
  // direct accumulates [xr*yr, xi*yi], cross accumulates [xr*yi, xi*yr]
  __m256d direct = _mm256_setzero_pd();
  __m256d cross = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * k);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * k);
    direct = _mm256_fmadd_pd(xv, yv, direct);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), cross);
  }
  alignas(32) double d[4], c[4];
  _mm256_store_pd(d, direct);
  _mm256_store_pd(c, cross);
  double re = (d[0] + d[1]) + (d[2] + d[3]);
  double im = (c[0] - c[1]) + (c[2] - c[3]);
  for (; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void scale_real(std::span<const double> d, double s, std::span<cplx> x) {
  const std::size_t n = x.size();
  double* xp = raw(x.data());
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m128d dd = _mm_loadu_pd(d.data() + k);
    const __m256d dup = _mm256_permute4x64_pd(_mm256_castpd128_pd256(dd), 0b01010000);
    const __m256d xv = _mm256_loadu_pd(xp + 2 * k);
    _mm256_storeu_pd(xp + 2 * k, _mm256_mul_pd(xv, _mm256_mul_pd(sv, dup)));
  }
  for (; k < n; ++k) x[k] *= s * d[k];
}

void gemm_block(const cplx* a, std::size_t n, const cplx* x, std::size_t m, cplx* y) {
  std::fill(y, y + n * m, cplx(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    std::span<const cplx> col(a + k * n, n);
    for (std::size_t j = 0; j < m; ++j) {
      axpy(x[j * n + k], col, std::span<cplx>(y + j * n, n));
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", &axpy, &dotc, &scale_real, &gemm_block};
  return table;
}

}  // namespace fsm::kernels

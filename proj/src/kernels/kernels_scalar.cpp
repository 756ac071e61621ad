#include "fsm/kernels.hpp"

#include <algorithm>

namespace fsm::kernels {
namespace {

void axpy(cplx a, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    y[k] = cplx(y[k].real() + a.real() * xr - a.imag() * xi,
                y[k].imag() + a.real() * xi + a.imag() * xr);
  }
}

cplx dotc(std::span<const cplx> x, std::span<const cplx> y) {
  double re = 0.0, im = 0.0;
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = x[k].real(), xi = x[k].imag();
    const double yr = y[k].real(), yi = y[k].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void scale_real(std::span<const double> d, double s, std::span<cplx> x) {
  const std::size_t n = x.size();
  for (std::size_t k = 0; k < n; ++k) x[k] *= s * d[k];
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

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &axpy, &dotc, &scale_real, &gemm_block};
  return table;
}

}  // namespace fsm::kernels

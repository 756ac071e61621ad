#pragma once

// Inner-loop kernels on interleaved complex<double> data.
//
// Every kernel has a portable scalar reference implementation and, where the
// target supports it, an AVX2/FMA variant. The variant is picked once at
// runtime from the CPU feature set; FSM_KERNELS=scalar|avx2 overrides the
// choice. All variants must agree with the scalar reference up to FMA
// rounding; tests/test_kernels.cpp checks this.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace fsm::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  // y += a * x
  void (*axpy)(cplx a, std::span<const cplx> x, std::span<cplx> y);

  // sum_k conj(x_k) * y_k
  cplx (*dotc)(std::span<const cplx> x, std::span<const cplx> y);

  // x_k *= s * d_k   (real diagonal scaling)
  void (*scale_real)(std::span<const double> d, double s, std::span<cplx> x);

  // Y (n x m) = A (n x n) * X (n x m); all column-major with leading
  // dimension n. Y must not alias A or X.
  void (*gemm_block)(const cplx* a, std::size_t n, const cplx* x, std::size_t m, cplx* y);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the features.
const KernelTable* avx2_kernels();

// The table selected for this process.
const KernelTable& active();

}  // namespace fsm::kernels

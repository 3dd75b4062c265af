#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the density-matrix integrator: complex
// axpy/combine, CSR sparse matrix-vector products and reductions over
// vec(rho). Scalar reference implementations are the semantic definition;
// an AVX2 variant is selected at runtime when the CPU supports it and is
// equivalence-tested against the scalar path. Override with
// PBEC_KERNELS=scalar|avx2 in the environment.
namespace pbec::kernels {

using cplx = std::complex<double>;

struct Table {
  // y += a*x
  void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  // out = x + a*k   (RK4 staging; out, x, k distinct)
  void (*scaled_sum)(std::size_t n, const cplx* x, cplx a, const cplx* k,
                     cplx* out);
  // x += h*(k1 + 2 k2 + 2 k3 + k4)   (RK4 combine, h = dt/6)
  void (*rk4_combine)(std::size_t n, cplx* x, double h, const cplx* k1,
                      const cplx* k2, const cplx* k3, const cplx* k4);
  // y = A x  for CSR A (row_ptr has n_rows+1 entries)
  void (*spmv)(std::size_t n_rows, const std::int64_t* row_ptr,
               const std::int32_t* col, const cplx* val, const cplx* x,
               cplx* y);
  // sum |x_i|^2
  double (*norm2sq)(std::size_t n, const cplx* x);
  const char* name;
};

const Table& scalar_table();
#if defined(PBEC_BUILD_AVX2)
const Table& avx2_table();
#endif

// Runtime-selected table (CPU capability + PBEC_KERNELS override).
const Table& active();
const char* backend_name();

}  // namespace pbec::kernels

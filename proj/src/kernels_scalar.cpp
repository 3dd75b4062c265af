#include "pbec/kernels.hpp"

namespace pbec::kernels {
namespace {

void axpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scaled_sum_scalar(std::size_t n, const cplx* x, cplx a, const cplx* k,
                       cplx* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * k[i];
}

void rk4_combine_scalar(std::size_t n, cplx* x, double h, const cplx* k1,
                        const cplx* k2, const cplx* k3, const cplx* k4) {
  for (std::size_t i = 0; i < n; ++i)
    x[i] += h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void spmv_scalar(std::size_t n_rows, const std::int64_t* row_ptr,
                 const std::int32_t* col, const cplx* val, const cplx* x,
                 cplx* y) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    cplx acc{};
    for (std::int64_t j = row_ptr[r]; j < row_ptr[r + 1]; ++j)
      acc += val[j] * x[col[j]];
    y[r] = acc;
  }
}

double norm2sq_scalar(std::size_t n, const cplx* x) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{axpy_scalar, scaled_sum_scalar, rk4_combine_scalar,
                       spmv_scalar, norm2sq_scalar, "scalar"};
  return t;
}

}  // namespace pbec::kernels

#include "pbec/kernels.hpp"

#if defined(PBEC_BUILD_AVX2)

#include <immintrin.h>

namespace pbec::kernels {
namespace {

// One __m256d holds two interleaved complex doubles [re0 im0 re1 im1].
// prod = w * z for packed complex pairs, w broadcast as [wr wi wr wi].
inline __m256d cmul_broadcast(__m256d w, __m256d w_swapped, __m256d z) {
  const __m256d zr = _mm256_movedup_pd(z);           // [zr0 zr0 zr1 zr1]
  const __m256d zi = _mm256_permute_pd(z, 0xF);      // [zi0 zi0 zi1 zi1]
  return _mm256_fmaddsub_pd(zr, w, _mm256_mul_pd(zi, w_swapped));
}

inline __m256d broadcast(cplx a) {
  return _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
}
inline __m256d broadcast_swapped(cplx a) {
  return _mm256_setr_pd(a.imag(), a.real(), a.imag(), a.real());
}

void axpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d w = broadcast(a);
  const __m256d ws = broadcast_swapped(a);
  auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_broadcast(w, ws, xv)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scaled_sum_avx2(std::size_t n, const cplx* x, cplx a, const cplx* k,
                     cplx* out) {
  const __m256d w = broadcast(a);
  const __m256d ws = broadcast_swapped(a);
  auto* xd = reinterpret_cast<const double*>(x);
  auto* kd = reinterpret_cast<const double*>(k);
  auto* od = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d kv = _mm256_loadu_pd(kd + 2 * i);
    _mm256_storeu_pd(od + 2 * i, _mm256_add_pd(xv, cmul_broadcast(w, ws, kv)));
  }
  for (; i < n; ++i) out[i] = x[i] + a * k[i];
}

void rk4_combine_avx2(std::size_t n, cplx* x, double h, const cplx* k1,
                      const cplx* k2, const cplx* k3, const cplx* k4) {
  const __m256d hv = _mm256_set1_pd(h);
  const __m256d two = _mm256_set1_pd(2.0);
  auto* xd = reinterpret_cast<double*>(x);
  auto* a1 = reinterpret_cast<const double*>(k1);
  auto* a2 = reinterpret_cast<const double*>(k2);
  auto* a3 = reinterpret_cast<const double*>(k3);
  auto* a4 = reinterpret_cast<const double*>(k4);
  std::size_t i = 0;
  const std::size_t nd = 2 * n;
  for (; i + 4 <= nd; i += 4) {
    const __m256d s23 =
        _mm256_add_pd(_mm256_loadu_pd(a2 + i), _mm256_loadu_pd(a3 + i));
    __m256d t = _mm256_add_pd(_mm256_loadu_pd(a1 + i), _mm256_loadu_pd(a4 + i));
    t = _mm256_fmadd_pd(two, s23, t);
    _mm256_storeu_pd(xd + i, _mm256_fmadd_pd(hv, t, _mm256_loadu_pd(xd + i)));
  }
  for (; i < nd; ++i) xd[i] += h * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
}

void spmv_avx2(std::size_t n_rows, const std::int64_t* row_ptr,
               const std::int32_t* col, const cplx* val, const cplx* x,
               cplx* y) {
  auto* vd = reinterpret_cast<const double*>(val);
  auto* xd = reinterpret_cast<const double*>(x);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const std::int64_t j0 = row_ptr[r];
    const std::int64_t j1 = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    std::int64_t j = j0;
    for (; j + 2 <= j1; j += 2) {
      const __m256d vv = _mm256_loadu_pd(vd + 2 * j);
      const __m256d xv = _mm256_set_m128d(_mm_loadu_pd(xd + 2 * col[j + 1]),
                                          _mm_loadu_pd(xd + 2 * col[j]));
      const __m256d xr = _mm256_movedup_pd(xv);
      const __m256d xi = _mm256_permute_pd(xv, 0xF);
      const __m256d vs = _mm256_permute_pd(vv, 0x5);
      acc = _mm256_add_pd(acc,
                          _mm256_fmaddsub_pd(xr, vv, _mm256_mul_pd(xi, vs)));
    }
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d sum = _mm_add_pd(lo, hi);
    cplx a{_mm_cvtsd_f64(sum), _mm_cvtsd_f64(_mm_unpackhi_pd(sum, sum))};
    for (; j < j1; ++j) a += val[j] * x[col[j]];
    y[r] = a;
  }
}

double norm2sq_avx2(std::size_t n, const cplx* x) {
  auto* xd = reinterpret_cast<const double*>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t nd = 2 * n;
  for (; i + 4 <= nd; i += 4) {
    const __m256d v = _mm256_loadu_pd(xd + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  double s = _mm_cvtsd_f64(s2) + _mm_cvtsd_f64(_mm_unpackhi_pd(s2, s2));
  for (; i < nd; ++i) s += xd[i] * xd[i];
  return s;
}

}  // namespace

const Table& avx2_table() {
  static const Table t{axpy_avx2, scaled_sum_avx2, rk4_combine_avx2, spmv_avx2,
                       norm2sq_avx2, "avx2"};
  return t;
}

}  // namespace pbec::kernels

#endif  // PBEC_BUILD_AVX2

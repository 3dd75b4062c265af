#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "pbec/kernels.hpp"

using pbec::kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& x : v) x = {u(rng), u(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

// The scalar table is the semantic reference; the runtime-selected backend
// must agree on random data to a few ulps.
TEST_CASE("active backend matches scalar reference") {
  const auto& scalar = pbec::kernels::scalar_table();
  const auto& active = pbec::kernels::active();
  INFO("active backend: ", active.name);

  for (std::size_t n : {1u, 2u, 3u, 17u, 256u, 1001u}) {
    const cplx alpha{0.37, -1.21};
    auto x = random_vec(n, 42 + static_cast<unsigned>(n));
    auto y0 = random_vec(n, 1000 + static_cast<unsigned>(n));

    auto y1 = y0, y2 = y0;
    scalar.axpy(n, alpha, x.data(), y1.data());
    active.axpy(n, alpha, x.data(), y2.data());
    CHECK(max_diff(y1, y2) < 1e-14);

    std::vector<cplx> o1(n), o2(n);
    scalar.scaled_sum(n, y0.data(), alpha, x.data(), o1.data());
    active.scaled_sum(n, y0.data(), alpha, x.data(), o2.data());
    CHECK(max_diff(o1, o2) < 1e-14);

    auto k1 = random_vec(n, 7), k2 = random_vec(n, 8), k3 = random_vec(n, 9),
         k4 = random_vec(n, 10);
    auto xa = y0, xb = y0;
    scalar.rk4_combine(n, xa.data(), 0.01, k1.data(), k2.data(), k3.data(),
                       k4.data());
    active.rk4_combine(n, xb.data(), 0.01, k1.data(), k2.data(), k3.data(),
                       k4.data());
    CHECK(max_diff(xa, xb) < 1e-14);

    CHECK(scalar.norm2sq(n, x.data()) ==
          doctest::Approx(active.norm2sq(n, x.data())).epsilon(1e-13));
  }
}

TEST_CASE("spmv equivalence on random sparse matrices") {
  const auto& scalar = pbec::kernels::scalar_table();
  const auto& active = pbec::kernels::active();

  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t rows = 50 + 37 * trial;
    std::vector<std::int64_t> rp{0};
    std::vector<std::int32_t> col;
    std::vector<cplx> val;
    std::uniform_int_distribution<int> nnz_d(0, 9);
    std::uniform_int_distribution<int> col_d(0, static_cast<int>(rows) - 1);
    for (std::size_t r = 0; r < rows; ++r) {
      const int k = nnz_d(rng);
      for (int j = 0; j < k; ++j) {
        col.push_back(col_d(rng));
        val.push_back({u(rng), u(rng)});
      }
      rp.push_back(static_cast<std::int64_t>(col.size()));
    }
    auto x = random_vec(rows, 55 + trial);
    std::vector<cplx> y1(rows), y2(rows);
    scalar.spmv(rows, rp.data(), col.data(), val.data(), x.data(), y1.data());
    active.spmv(rows, rp.data(), col.data(), val.data(), x.data(), y2.data());
    CHECK(max_diff(y1, y2) < 1e-13);
  }
}

TEST_CASE("spmv against a dense hand computation") {
  // 3x3 with known entries
  std::vector<std::int64_t> rp{0, 2, 3, 5};
  std::vector<std::int32_t> col{0, 2, 1, 0, 2};
  std::vector<cplx> val{{1, 0}, {0, 1}, {2, 0}, {0, -1}, {3, 0}};
  std::vector<cplx> x{{1, 1}, {2, 0}, {0, 3}};
  std::vector<cplx> y(3);
  pbec::kernels::active().spmv(3, rp.data(), col.data(), val.data(), x.data(),
                               y.data());
  CHECK(std::abs(y[0] - (cplx{1, 1} + cplx{0, 1} * cplx{0, 3})) < 1e-15);
  CHECK(std::abs(y[1] - cplx{4, 0}) < 1e-15);
  CHECK(std::abs(y[2] - (cplx{0, -1} * cplx{1, 1} + cplx{9, 0})) < 1e-15);
}

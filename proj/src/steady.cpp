#include <Eigen/SparseLU>

#include "pbec/evolve.hpp"

namespace pbec::lindblad {

namespace {

Eigen::VectorXcd trace_row(long dim) {
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(dim * dim);
  for (long i = 0; i < dim; ++i) t[i * dim + i] = 1.0;
  return t;
}

QuantumState normalize_trace(const HilbertLayout& layout,
                             Eigen::VectorXcd v) {
  QuantumState s;
  s.layout = layout;
  const long d = layout.dimension();
  cplx tr{};
  for (long i = 0; i < d; ++i) tr += v[i * d + i];
  if (std::abs(tr) < 1e-300)
    throw std::runtime_error("steady_state: traceless null vector");
  s.rho = v / tr;
  return s;
}

double rel_residual(const LiouvillianSpec& L, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd y(x.size());
  L.apply(x.data(), y.data());
  const double s = std::max(L.scale(), 1e-300);
  return y.norm() / (s * x.norm());
}

}  // namespace

SteadyResult steady_state(const LiouvillianSpec& L, const SteadyOptions& opts) {
  SteadyResult out;
  const long n = L.dim_l;

  if (n <= opts.dense_cap) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (long r = 0; r < n; ++r)
      for (std::int64_t j = L.row_ptr[r]; j < L.row_ptr[r + 1]; ++j)
        A(r, L.col[j]) = L.val[j];

    if (opts.detect_degeneracy) {
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
      cod.setThreshold(1e-10);
      const long null_dim = n - cod.rank();
      out.null_space_dim = static_cast<int>(null_dim);
      if (null_dim > 1)
        throw std::runtime_error(
            "steady_state: non-unique steady state (null-space dimension " +
            std::to_string(null_dim) + ")");
    }

    // Trace-constrained least squares: min ||[A; w t^T] x - [0; w]||.
    const double w = std::max(L.scale(), 1.0);
    Eigen::MatrixXcd B(n + 1, n);
    B.topRows(n) = A;
    B.row(n) = w * trace_row(L.dim).transpose();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
    rhs[n] = w;
    Eigen::VectorXcd x = B.colPivHouseholderQr().solve(rhs);
    out.state = normalize_trace(L.layout, x);
    out.state.time = 0.0;
    out.residual = rel_residual(L, out.state.rho);
    out.method = "dense-lsq";
    if (out.residual < 1e-6) return out;
  }

  // Sparse direct solve: replace the first row by the trace row and solve
  // L x = e0. Works whenever the steady state is unique.
  {
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(L.val.size() + L.dim);
    for (long i = 0; i < L.dim; ++i)
      trip.emplace_back(0, i * L.dim + i, 1.0);
    for (long r = 1; r < n; ++r)
      for (std::int64_t j = L.row_ptr[r]; j < L.row_ptr[r + 1]; ++j)
        trip.emplace_back(static_cast<int>(r), L.col[j], L.val[j]);
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
      rhs[0] = 1.0;
      Eigen::VectorXcd x = lu.solve(rhs);
      if (lu.info() == Eigen::Success) {
        const double res = rel_residual(L, x);
        if (res < 100.0 * opts.tolerance) {
          out.state = normalize_trace(L.layout, x);
          out.residual = rel_residual(L, out.state.rho);
          out.null_space_dim = -1;
          out.method = "sparse-lu";
          return out;
        }
      }
    }
  }

  if (!opts.allow_iterative)
    throw std::runtime_error("steady_state: direct solves failed");

  // Evolution to stationarity.
  QuantumState s =
      opts.seed ? *opts.seed : QuantumState::maximally_mixed(L.layout);
  const double dt = 0.2 / L.scale();
  EvolveOptions eo;
  eo.dt = dt;
  eo.sample_stride = 1 << 30;
  eo.track_eigenvalues = false;
  double best = rel_residual(L, s.rho);
  for (int chunk = 0; chunk < 400 && best > opts.tolerance; ++chunk) {
    eo.t_final = 2000.0 * dt;
    evolve(s, L, eo);
    best = rel_residual(L, s.rho);
  }
  if (best > opts.tolerance)
    throw std::runtime_error(
        "steady_state: evolution did not reach stationarity (best residual " +
        std::to_string(best) + ")");
  out.state = normalize_trace(L.layout, s.rho);
  out.residual = rel_residual(L, out.state.rho);
  out.method = "evolve";
  return out;
}

}  // namespace pbec::lindblad

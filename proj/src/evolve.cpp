#include "pbec/evolve.hpp"

#include <cmath>
#include <stdexcept>

#include "pbec/kernels.hpp"

namespace pbec::lindblad {

QuantumState QuantumState::basis_state(const HilbertLayout& layout,
                                       long index) {
  layout.validate();
  const long d = layout.dimension();
  if (index < 0 || index >= d)
    throw std::invalid_argument("basis_state: index out of range");
  QuantumState s;
  s.layout = layout;
  s.rho = Eigen::VectorXcd::Zero(d * d);
  s.rho[index * d + index] = 1.0;
  return s;
}

QuantumState QuantumState::maximally_mixed(const HilbertLayout& layout) {
  layout.validate();
  const long d = layout.dimension();
  QuantumState s;
  s.layout = layout;
  s.rho = Eigen::VectorXcd::Zero(d * d);
  for (long i = 0; i < d; ++i) s.rho[i * d + i] = 1.0 / double(d);
  return s;
}

QuantumState QuantumState::from_density(const HilbertLayout& layout,
                                        const Eigen::MatrixXcd& density) {
  layout.validate();
  const long d = layout.dimension();
  if (density.rows() != d || density.cols() != d)
    throw std::invalid_argument("from_density: dimension mismatch");
  QuantumState s;
  s.layout = layout;
  s.rho = Eigen::Map<const Eigen::VectorXcd>(density.data(), d * d);
  return s;
}

Eigen::MatrixXcd QuantumState::density() const {
  const long d = dim();
  return Eigen::Map<const Eigen::MatrixXcd>(rho.data(), d, d);
}

cplx QuantumState::trace() const {
  const long d = dim();
  cplx t{};
  for (long i = 0; i < d; ++i) t += rho[i * d + i];
  return t;
}

double QuantumState::trace_error() const { return std::abs(trace() - 1.0); }

double QuantumState::hermiticity_error() const {
  const auto m = density();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double QuantumState::min_eigenvalue() const {
  const auto m = density();
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double QuantumState::purity() const {
  return kernels::active().norm2sq(static_cast<std::size_t>(rho.size()),
                                   rho.data());
}

double QuantumState::expect_diagonal(const std::vector<double>& diag) const {
  const long d = dim();
  double v = 0.0;
  for (long i = 0; i < d; ++i) v += diag[i] * rho[i * d + i].real();
  return v;
}

Trajectory evolve(QuantumState& state, const LiouvillianSpec& L,
                  const EvolveOptions& opts) {
  if (L.dim != state.dim())
    throw std::invalid_argument("evolve: state/Liouvillian mismatch");
  if (opts.dt <= 0.0 || opts.t_final <= 0.0)
    throw std::invalid_argument("evolve: dt and t_final must be > 0");
  if (opts.dt * L.scale() > 1.0)
    throw std::invalid_argument(
        "evolve: dt does not resolve the fastest scale; reduce dt below "
        "0.1/max(frequencies, rates)");

  const long n = L.dim_l;
  const auto& K = kernels::active();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto* x = state.rho.data();

  std::vector<std::vector<double>> nph_diag, top_diag;
  for (std::size_t m = 0; m < L.layout.photon_cutoffs.size(); ++m) {
    nph_diag.push_back(photon_number_diagonal(L.layout, static_cast<int>(m)));
    top_diag.push_back(
        cutoff_indicator_diagonal(L.layout, static_cast<int>(m)));
  }
  const auto exc_diag = excitation_diagonal(L.layout);

  Trajectory traj;
  traj.min_eigenvalue = 0.0;

  const long n_steps =
      static_cast<long>(std::ceil(opts.t_final / opts.dt - 1e-12));

  auto record = [&]() {
    TrajectoryPoint p;
    p.t = state.time;
    for (const auto& d : nph_diag) p.n_photon.push_back(state.expect_diagonal(d));
    p.excitation = state.expect_diagonal(exc_diag);
    p.purity = state.purity();
    p.trace_err = state.trace_error();
    for (const auto& d : top_diag)
      traj.max_top_fock =
          std::max(traj.max_top_fock, state.expect_diagonal(d));
    traj.max_trace_error = std::max(traj.max_trace_error, p.trace_err);
    if (opts.track_eigenvalues) {
      traj.max_hermiticity_error =
          std::max(traj.max_hermiticity_error, state.hermiticity_error());
      const double ev = state.min_eigenvalue();
      traj.min_eigenvalue = std::min(traj.min_eigenvalue, ev);
      if (ev < -opts.positivity_tolerance) traj.positivity_flagged = true;
    }
    traj.points.push_back(std::move(p));
    if (p.trace_err > opts.trace_abort)
      throw std::runtime_error(
          "evolve: trace drift exceeded 1e-6; reduce dt (the integrator is "
          "fixed-step RK4, error scales as dt^4)");
  };

  record();
  const std::size_t un = static_cast<std::size_t>(n);
  for (long s = 0; s < n_steps; ++s) {
    const double h = opts.dt;
    L.apply(x, k1.data());
    K.scaled_sum(un, x, 0.5 * h, k1.data(), tmp.data());
    L.apply(tmp.data(), k2.data());
    K.scaled_sum(un, x, 0.5 * h, k2.data(), tmp.data());
    L.apply(tmp.data(), k3.data());
    K.scaled_sum(un, x, h, k3.data(), tmp.data());
    L.apply(tmp.data(), k4.data());
    K.rk4_combine(un, x, h / 6.0, k1.data(), k2.data(), k3.data(), k4.data());
    state.time += h;
    if ((s + 1) % opts.sample_stride == 0 || s + 1 == n_steps) record();
  }
  return traj;
}

}  // namespace pbec::lindblad

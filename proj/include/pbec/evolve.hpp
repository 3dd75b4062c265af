#pragma once

#include <Eigen/Dense>
#include <optional>

#include "pbec/liouvillian.hpp"

namespace pbec::lindblad {

// Density matrix as vec(rho) (column-major) over a HilbertLayout.
struct QuantumState {
  HilbertLayout layout;
  Eigen::VectorXcd rho;
  double time = 0.0;

  static QuantumState basis_state(const HilbertLayout& layout, long index);
  static QuantumState maximally_mixed(const HilbertLayout& layout);
  static QuantumState from_density(const HilbertLayout& layout,
                                   const Eigen::MatrixXcd& density);

  long dim() const { return layout.dimension(); }
  Eigen::MatrixXcd density() const;

  cplx trace() const;
  double trace_error() const;       // |tr rho - 1|
  double hermiticity_error() const; // max |rho - rho†| entry
  double min_eigenvalue() const;
  double purity() const;            // tr rho^2
  // tr(diag(d) rho) for a number-type observable
  double expect_diagonal(const std::vector<double>& diag) const;
};

struct TrajectoryPoint {
  double t = 0.0;
  std::vector<double> n_photon;  // per mode
  double excitation = 0.0;       // total molecular excitation
  double purity = 0.0;
  double trace_err = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_top_fock = 0.0;  // truncation-leakage monitor
  bool positivity_flagged = false;
};

struct EvolveOptions {
  double t_final = 0.0;
  double dt = 0.0;
  int sample_stride = 1;      // record every k-th step
  bool track_eigenvalues = true;  // min-eigenvalue health monitor
  double trace_abort = 1e-6;
  double positivity_tolerance = 1e-10;
};

// Fixed-step RK4 on the vectorized master equation; trace renormalization is
// deliberately off -- trace drift is a diagnostic and aborts past 1e-6.
Trajectory evolve(QuantumState& state, const LiouvillianSpec& L,
                  const EvolveOptions& opts);

struct SteadyOptions {
  long dense_cap = 2048;           // Liouville dimension for the dense path
  bool detect_degeneracy = true;
  double tolerance = 1e-10;        // on ||L rho|| / (scale ||rho||)
  std::optional<QuantumState> seed;  // warm start for the iterative path
  bool allow_iterative = true;
};

struct SteadyResult {
  QuantumState state;
  double residual = 0.0;
  int null_space_dim = -1;  // -1: not determined
  std::string method;
};

// L(rho) = 0 with unit trace: dense trace-constrained least squares for
// small problems, sparse LU above that, evolution to stationarity as the
// fallback. Non-unique steady states (null-space dimension > 1) throw.
SteadyResult steady_state(const LiouvillianSpec& L,
                          const SteadyOptions& opts = {});

}  // namespace pbec::lindblad

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace pbec {

enum class GeometryKind { FreeSpace, PlanarCavity };

// Free space or a two-mirror planar cavity. Mirrors are described by their
// complex amplitude reflection coefficients per polarization at the inner
// faces (constants in v1), or by the perfect-mirror flag (r_s = -1, r_p = +1).
// The medium between the mirrors is a lossless background of real relative
// permittivity background_eps (1 in all reference configurations).
struct GeometrySpec {
  GeometryKind kind = GeometryKind::FreeSpace;
  double cavity_length = 0.0;  // d, meters
  double emitter_z = 0.0;      // distance from mirror 1, meters
  std::complex<double> r1_s{0.0, 0.0}, r1_p{0.0, 0.0};
  std::complex<double> r2_s{0.0, 0.0}, r2_p{0.0, 0.0};
  bool perfect_mirrors = false;
  double background_eps = 1.0;

  void validate() const {
    if (kind == GeometryKind::FreeSpace) {
      if (background_eps != 1.0)
        throw std::invalid_argument("geometry: free space requires eps = 1");
      return;
    }
    if (cavity_length <= 0.0)
      throw std::invalid_argument("geometry: cavity_length must be > 0");
    if (!(emitter_z > 0.0 && emitter_z < cavity_length))
      throw std::invalid_argument("geometry: emitter_z must lie inside (0,d)");
    if (background_eps < 1.0)
      throw std::invalid_argument("geometry: background_eps must be >= 1");
    for (auto r : {r1_s, r1_p, r2_s, r2_p})
      if (std::abs(r) > 1.0 + 1e-12)
        throw std::invalid_argument("geometry: |r| must be <= 1");
  }

  std::complex<double> rs1() const { return perfect_mirrors ? -1.0 : r1_s; }
  std::complex<double> rs2() const { return perfect_mirrors ? -1.0 : r2_s; }
  std::complex<double> rp1() const { return perfect_mirrors ? +1.0 : r1_p; }
  std::complex<double> rp2() const { return perfect_mirrors ? +1.0 : r2_p; }
};

// Im G(r_i, r_i, omega) and quadrature diagnostics.
struct GreensEvaluation {
  double omega = 0.0;
  Eigen::Matrix3d imG = Eigen::Matrix3d::Zero();  // 1/m
  double quadrature_error = 0.0;   // achieved absolute estimate
  bool quadrature_warning = false; // converged past 1e-8 but within 1e-6
  // optional sampled integrand (|k_par|/k, Im integrand) for diagnostics
  std::vector<std::pair<double, double>> decomposition_by_k;
};

// One fitted Lorentzian cavity resonance. delta_nu is derived, never stored.
struct CavityMode {
  int index = 0;
  double omega_nu = 0.0;  // rad/s
  double gamma_nu = 0.0;  // FWHM, rad/s
  double Omega_nu = 0.0;  // Rabi frequency at the molecule position, rad/s
  double fit_residual = 0.0;  // relative L2 residual of the Lorentzian fit
  bool degraded_fit = false;

  double delta_nu(double omega10) const { return omega_nu - omega10; }

  void validate() const {
    if (gamma_nu <= 0.0)
      throw std::invalid_argument("mode: gamma_nu must be > 0");
    if (Omega_nu < 0.0)
      throw std::invalid_argument("mode: Omega_nu must be >= 0");
  }
};

}  // namespace pbec

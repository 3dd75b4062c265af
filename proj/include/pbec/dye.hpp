#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbec/constants.hpp"

namespace pbec {

// Two-level molecule dressed by a single rovibrational mode.
struct DyeParameters {
  double omega10 = 0.0;   // electronic transition, rad/s (Lamb shifts absorbed)
  double Omega = 0.0;     // rovibrational quantum, rad/s
  double huang_rhys = 0.0;  // S, dimensionless
  double d01 = 0.0;       // dipole magnitude, C m
  Eigen::Vector3d dipole_axis = Eigen::Vector3d::UnitX();
  double temperature = 300.0;  // K
  long n_molecules = 1;

  void validate(std::vector<std::string>* warnings = nullptr) const {
    if (omega10 <= 0.0) throw std::invalid_argument("dye: omega10 must be > 0");
    if (Omega <= 0.0) throw std::invalid_argument("dye: Omega must be > 0");
    if (huang_rhys < 0.0) throw std::invalid_argument("dye: S must be >= 0");
    if (d01 < 0.0) throw std::invalid_argument("dye: d01 must be >= 0");
    if (temperature <= 0.0)
      throw std::invalid_argument("dye: temperature must be > 0");
    // N = 0 is the empty-cavity limit (molecules absent, photons decay
    // freely); every molecular quantity is then unused.
    if (n_molecules < 0)
      throw std::invalid_argument("dye: n_molecules must be >= 0");
    if (warnings && Omega > 0.1 * omega10)
      warnings->push_back(
          "dye: Omega/omega10 = " + std::to_string(Omega / omega10) +
          " exceeds 0.1; the rovibrational-scale separation is marginal");
  }

  Eigen::Vector3d dipole_vector() const {
    return d01 * dipole_axis.normalized();
  }

  double nbar() const {  // thermal phonon occupation of the Omega mode
    const double x = constants::hbar * Omega /
                     (constants::k_B * temperature);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
  }
};

enum class Lineshape { Rectangular, Gaussian, Lorentzian };

// Incoherent broadband pump. I0 is the spectral-peak intensity at omega10;
// laser_temperature is metadata for the inverted-oscillator picture.
struct LaserSpec {
  double I0 = 0.0;          // W/m^2
  Lineshape lineshape = Lineshape::Lorentzian;
  double gamma_L = 0.0;     // spectral width, rad/s
  double omega_L = 0.0;     // center, rad/s
  double laser_temperature = -1.0;  // K, negative by construction

  void validate() const {
    if (I0 < 0.0) throw std::invalid_argument("laser: I0 must be >= 0");
    if (gamma_L <= 0.0)
      throw std::invalid_argument("laser: gamma_L must be > 0");
    if (laser_temperature >= 0.0)
      throw std::invalid_argument("laser: laser_temperature must be < 0");
  }
};

}  // namespace pbec

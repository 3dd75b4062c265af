#pragma once

#include <vector>

#include "pbec/dye.hpp"
#include "pbec/geometry.hpp"

// Imaginary part of the classical electromagnetic Green's tensor at
// coincident points, and the geometry-derived quantities built on it:
// spontaneous decay rates, Lorentzian cavity modes and Rabi frequencies.
namespace pbec::greens {

struct QuadratureOptions {
  double rel_target = 1e-8;  // requested relative accuracy
  double rel_cap = 1e-6;     // beyond this the evaluation is an error
  int max_intervals = 4000;
  bool keep_integrand_samples = false;
};

// Coincident-point Im G. Free space: (omega/6 pi c) * Identity. Planar
// cavity: free part plus the two-interface multiple-reflection scattering
// series, integrated over transverse wavenumber along a contour deformed
// below the real axis (the guided-mode poles sit above it).
GreensEvaluation im_greens(const GeometrySpec& g, double omega,
                           const QuadratureOptions& opts = {});

// Normal-incidence (axial) cavity response used for mode location: the
// s-polarized multiple-reflection sum at k_par = 0. Lorentzian peaks of this
// function are the cavity resonances of Lorentzian width gamma_nu.
double axial_response(const GeometrySpec& g, double omega);

// Locate cavity resonances in [omega_lo, omega_hi], fit (omega_nu, gamma_nu)
// and attach the Rabi frequency from the full Im G at the fitted center.
// Perfect mirrors yield the analytic standing-wave list.
std::vector<CavityMode> extract_modes(const GeometrySpec& g,
                                      const DyeParameters& dye,
                                      double omega_lo, double omega_hi,
                                      int max_modes,
                                      const QuadratureOptions& opts = {});

// Total spontaneous decay rate 2 (mu0/hbar) omega10^2 d.ImG(omega10).d.
double gamma_down_total(const DyeParameters& dye, const GeometrySpec& g,
                        bool isotropic_average = false,
                        const QuadratureOptions& opts = {});

struct ResonantDecay {
  double rate = 0.0;   // Gamma_down^r, rad/s
  double shift = 0.0;  // Delta_Gamma_down^r, rad/s (closed-form PV)
};

// Lorentzian sum over modes and its principal-value companion shift.
ResonantDecay gamma_down_resonant(const std::vector<CavityMode>& modes,
                                  const DyeParameters& dye);

}  // namespace pbec::greens

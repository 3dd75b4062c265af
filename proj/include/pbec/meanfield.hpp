#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbec/dye.hpp"
#include "pbec/geometry.hpp"
#include "pbec/rates.hpp"

// Semiclassical rate equations from the mean-field factorization
// <a†a sigma†sigma> -> <a†a><sigma†sigma> of the final master equation, with
// a single homogeneous molecular excitation fraction f:
//   dn_nu/dt = -kappa_nu n_nu + N [G_em f (n_nu+1) - G_abs (1-f) n_nu]
//   df/dt    = G_up (1-f) - G_down f - sum_nu [G_em f (n_nu+1)
//                                              - G_abs (1-f) n_nu]
// f is the per-molecule fraction; the photon equations carry the explicit N.
namespace pbec::meanfield {

struct MeanFieldState {
  std::vector<double> n;  // photon population per mode
  double f = 0.0;         // molecular excited fraction
  double time = 0.0;
};

struct Derivative {
  std::vector<double> dn;
  double df = 0.0;
};

Derivative rhs(const MeanFieldState& state, const rates::RateSet& r,
               const std::vector<CavityMode>& modes, const DyeParameters& dye);

struct SteadyOutcome {
  MeanFieldState state;
  double residual = 0.0;        // ||rhs|| in rate-scaled units
  std::string method;           // newton | implicit-euler
  bool multiple_roots = false;  // distinct seeds disagreed beyond 1e-6
  std::vector<std::string> warnings;
};

// Damped Newton with positivity projection; stiff implicit-Euler marching
// with the analytic Jacobian as fallback. Residuals are measured with time
// scaled by the largest rate, so the 1e-12 stationarity target is
// dimensionless.
SteadyOutcome steady(const rates::RateSet& r,
                     const std::vector<CavityMode>& modes,
                     const DyeParameters& dye, double pump_gamma_up);

struct ScanResult {
  std::vector<double> pump;                 // Gamma_up grid
  std::vector<MeanFieldState> states;
  std::vector<double> ground_fraction;      // n_0 / sum n per pump
  std::optional<double> threshold;          // refined crossing, if bracketed
  bool bracketed = false;
  double crossing_fraction = 0.5;
};

ScanResult pump_scan(const rates::RateSet& r,
                     const std::vector<CavityMode>& modes,
                     const DyeParameters& dye,
                     const std::vector<double>& pump_grid,
                     double crossing_fraction = 0.5);

struct BoseEinsteinFit {
  double T_eff = 0.0;    // K
  double mu_eff = 0.0;   // J
  double residual = 0.0; // rms in log-population space
  bool degenerate = false;
  int modes_used = 0;
};

BoseEinsteinFit be_fit(const MeanFieldState& state,
                       const std::vector<CavityMode>& modes);

}  // namespace pbec::meanfield

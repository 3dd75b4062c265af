#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbec/correlation.hpp"
#include "pbec/dye.hpp"
#include "pbec/geometry.hpp"
#include "pbec/greens.hpp"

// Every rate and shift of the nested scheme. Stage 1: kappa, Gamma_up,
// Gamma_down and the convergent Lamb shifts. Stage 2: per-mode absorption
// and emission rates Gamma(+-delta_nu) and shifts K''(+-delta_nu) computed
// with the scalar damping Gamma = kappa + Gamma_down + Gamma_up.
namespace pbec::rates {

struct RateSet {
  double kappa = 0.0;            // ground-mode gamma_nu (scalar, feeds Gamma)
  double gamma_up = 0.0;
  double gamma_down_tot = 0.0;
  double gamma_down_res = 0.0;
  double gamma_down = 0.0;       // tot - res
  double Gamma = 0.0;            // kappa + gamma_down + gamma_up
  std::vector<double> gamma_abs;  // Gamma(delta_nu) per mode
  std::vector<double> gamma_em;   // Gamma(-delta_nu) per mode
  std::vector<double> kpp_abs;    // K''(delta_nu) per mode
  std::vector<double> kpp_em;     // K''(-delta_nu) per mode
  double delta_kappa = 0.0;       // configuration input (flat-with-cutoff)
  double delta_gamma_up = 0.0;    // light shift
  double delta_gamma_down_res = 0.0;

  std::string to_json() const;             // flat document, fixed key set
  static RateSet from_json(const std::string& text);
};

// kappa per mode equals the Lorentzian width of the resonance.
double kappa_from_mode(const CavityMode& mode);

// Broadband pump rate pi d01^2 I0 / (c eps0 hbar^2); lineshape-independent.
double gamma_up(const LaserSpec& laser, const DyeParameters& dye);

// Excitation integral Int L(omega) sin^2(omega t/2)/omega^2 domega for the
// given lineshape; approaches pi t / 2 for gamma_L t >> 1. Verification
// endpoint only.
double lineshape_limit(Lineshape shape, double gamma_L, double t);

// Light shift (d01^2 / 2 c eps0 hbar^2) PV Int I(omega)/(omega - omega10).
double light_shift(const LaserSpec& laser, const DyeParameters& dye);

struct AssembleOptions {
  std::optional<std::vector<CavityMode>> user_modes;  // bypasses `greens`
  std::optional<double> gamma_down_tot_override;      // required with modes
  std::optional<double> kappa_override;
  double delta_kappa = 0.0;        // flat-with-cutoff spectral model input
  bool isotropic_dipole = false;
  double scan_lo = 0.0, scan_hi = 0.0;  // 0 -> [0.5, 1.5] omega10
  int max_modes = 64;
  greens::QuadratureOptions quad{};
};

struct AssembledRates {
  RateSet rates;
  std::vector<CavityMode> modes;
  // Shifted-Hamiltonian coefficients of H'_S:
  double omega10_shifted = 0.0;          // omega10 + sum_nu K''(-delta_nu)
  std::vector<double> omega_nu_shifted;  // omega_nu + N K''(delta_nu)
  std::vector<double> cross_shift;       // K''(-delta_nu) - K''(delta_nu)
  std::vector<std::string> warnings;
};

// Full nested pipeline: stage-1 rates, then stage-2 transforms damped by
// Gamma = kappa + Gamma_down + Gamma_up.
AssembledRates assemble_rates(const DyeParameters& dye, const LaserSpec& laser,
                              const GeometrySpec& geometry,
                              const AssembleOptions& options = {});

struct KennardStepanovEntry {
  double delta_nu = 0.0;
  double ratio = 0.0;      // Gamma(delta)/Gamma(-delta) / exp(s beta hbar delta)
  double deviation = 0.0;  // |ratio - 1|
};

struct KennardStepanovReport {
  int orientation = +1;    // s, fixed by the T = 0 zero-phonon criterion
  bool regime_valid = true;  // Gamma << Omega and << kT/hbar
  std::vector<KennardStepanovEntry> entries;
  std::vector<std::string> flags;
};

KennardStepanovReport kennard_stepanov_check(
    const RateSet& rates, const std::vector<CavityMode>& modes,
    const DyeParameters& dye);

}  // namespace pbec::rates

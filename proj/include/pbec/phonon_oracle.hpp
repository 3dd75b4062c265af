#pragma once

#include "pbec/evolve.hpp"

// Brute-force validation of the nested reduction: the un-reduced model with
// an explicit phonon ladder (polaron-free molecule Hamiltonian, coherent
// photon-molecule coupling, stage-1 dissipators only) against the nested
// model in which the phonons have been traced into Gamma(+-delta_nu).
namespace pbec::lindblad {

struct PhononOracleConfig {
  DyeParameters dye;        // S, Omega, omega10, temperature
  double omega_nu = 0.0;    // cavity frequency, rad/s
  double kappa = 0.0;       // stage-1 rates
  double gamma_down = 0.0;
  double gamma_up = 0.0;
  double coupling = 0.0;    // g = Omega_nu, pre-polaron stage-2 normalization
  int photon_cutoff = 2;
  int phonon_cutoff = 20;
};

struct PhononOracleReport {
  double n_explicit = 0.0;
  double n_nested = 0.0;
  double rel_deviation = 0.0;
  double phonon_leakage = 0.0;   // top phonon level population
  double photon_leakage = 0.0;   // top photon level population
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  // detuning sweep (cavity as spectrometer of the molecular emission)
  std::vector<double> sweep_delta;
  std::vector<double> sweep_n_explicit;
  std::vector<double> sweep_gamma_em;      // nested Gamma(-delta) on the grid
  std::vector<double> peaks_explicit;      // refined peak detunings
  std::vector<double> peaks_nested;
  double max_peak_mismatch = 0.0;          // in rad/s, compare against Gamma
};

// Explicit-model Liouvillian in the frame rotating at omega10:
// H = delta_nu a†a + Omega b†b + Omega sqrt(S) sigma_z (b + b†)
//     + g (a sigma† + a† sigma), dissipators kappa, Gamma_down, Gamma_up.
LiouvillianSpec build_explicit_phonon_liouvillian(
    const PhononOracleConfig& cfg, double delta_nu);

// Nested-model Liouvillian for the same parameters (rates from k_transform).
LiouvillianSpec build_nested_reference(const PhononOracleConfig& cfg,
                                       double delta_nu);

PhononOracleReport explicit_phonon_oracle(const PhononOracleConfig& cfg,
                                          bool run_sweep = false,
                                          int coarse_points = 45);

}  // namespace pbec::lindblad

#pragma once

#include <complex>
#include <vector>

#include "pbec/dye.hpp"

// Polaron displacement correlator and its damped half-Fourier transform
// K(delta): the stage-2 machinery producing the per-mode absorption and
// emission rates Gamma(+-delta_nu) = 2 Re K and shifts K'' = Im K.
namespace pbec::rates {

using cplx = std::complex<double>;

struct CorrelationModel {
  double S = 0.0;           // Huang-Rhys factor
  double Omega = 0.0;       // phonon quantum, rad/s
  double temperature = 0.0; // K
  double nbar = 0.0;        // thermal occupation at Omega

  static CorrelationModel from_dye(const DyeParameters& dye);
  static CorrelationModel make(double S, double Omega, double temperature);
};

// Thermal two-time correlator <D† D(tau)> of the displacement operator
// D = exp(2 sqrt(S) (b† - b)); equals 1 at tau = 0, identically 1 for S = 0.
cplx displacement_correlation(const CorrelationModel& m, double tau);

// Harmonic weights of the periodic correlator, C(tau) = sum_k w_k e^{i k
// Omega tau}. Weights are real, non-negative and sum to 1; the range is
// trimmed so that the cumulative tail weight is below tail_tol.
struct SidebandWeights {
  int k_min = 0;
  std::vector<double> w;  // w[j] is the weight of harmonic k_min + j
  double truncation = 0.0;

  double sum() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
  }
};

SidebandWeights sideband_weights(const CorrelationModel& m,
                                 double tail_tol = 1e-12);

// K(delta) = Omega_nu^2 Int_0^inf <D†D(tau)> e^{-i delta tau} e^{-Gamma
// tau/2} dtau, evaluated term by term on the sideband series (each harmonic
// integrates to a closed-form complex Lorentzian). Units rad/s.
cplx k_transform(const CorrelationModel& m, double Omega_nu, double delta,
                 double Gamma);

// Absorption/emission rate Gamma(delta) = 2 Re K(delta) >= 0.
double gamma_of(const CorrelationModel& m, double Omega_nu, double delta,
                double Gamma);

}  // namespace pbec::rates

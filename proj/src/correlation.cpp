#include "pbec/correlation.hpp"

#include <cmath>
#include <stdexcept>

#include "pbec/constants.hpp"

namespace pbec::rates {

CorrelationModel CorrelationModel::make(double S, double Omega,
                                        double temperature) {
  if (S < 0.0) throw std::invalid_argument("correlation: S must be >= 0");
  if (Omega <= 0.0)
    throw std::invalid_argument("correlation: Omega must be > 0");
  if (temperature < 0.0)
    throw std::invalid_argument("correlation: temperature must be >= 0");
  CorrelationModel m;
  m.S = S;
  m.Omega = Omega;
  m.temperature = temperature;
  if (temperature == 0.0) {
    m.nbar = 0.0;
  } else {
    const double x =
        constants::hbar * Omega / (constants::k_B * temperature);
    m.nbar = x > 700.0 ? 0.0 : 1.0 / std::expm1(x);
  }
  return m;
}

CorrelationModel CorrelationModel::from_dye(const DyeParameters& dye) {
  return make(dye.huang_rhys, dye.Omega, dye.temperature);
}

cplx displacement_correlation(const CorrelationModel& m, double tau) {
  // exp{-4S[(1 - e^{+i Omega tau})(nbar+1) + (1 - e^{-i Omega tau}) nbar]}
  // At T = 0 this is the Poisson comb e^{-4S} sum_k (4S)^k/k! e^{+ik Omega
  // tau}: emission sidebands sit at positive harmonics.
  const cplx e_plus = std::exp(cplx(0.0, m.Omega * tau));
  const cplx arg = -4.0 * m.S *
                   ((1.0 - e_plus) * (m.nbar + 1.0) +
                    (1.0 - std::conj(e_plus)) * m.nbar);
  return std::exp(arg);
}

SidebandWeights sideband_weights(const CorrelationModel& m, double tail_tol) {
  SidebandWeights out;
  if (m.S == 0.0) {
    out.k_min = 0;
    out.w = {1.0};
    return out;
  }

  // Range estimate from the first two moments of the weight distribution:
  // mean k = 4S, variance 4S(2 nbar + 1).
  const double mean = 4.0 * m.S;
  const double sigma = std::sqrt(4.0 * m.S * (2.0 * m.nbar + 1.0));
  const int spread = static_cast<int>(std::ceil(14.0 * sigma + 20.0));
  int k_lo = static_cast<int>(std::floor(mean)) - spread;
  int k_hi = static_cast<int>(std::ceil(mean)) + spread;
  if (k_hi - k_lo > 20000)
    throw std::runtime_error(
        "sideband_weights: series truncation failure (pathological S/T)");

  // Trapezoid on one phonon period is spectrally accurate for the periodic
  // correlator; no Bessel evaluation can overflow here.
  const int n_k = k_hi - k_lo + 1;
  int M = 1;
  while (M < 8 * n_k) M *= 2;
  std::vector<cplx> samples(M);
  const double period = 2.0 * constants::pi / m.Omega;
  for (int j = 0; j < M; ++j)
    samples[j] = displacement_correlation(m, period * j / M);

  std::vector<double> w(n_k);
  for (int idx = 0; idx < n_k; ++idx) {
    const int k = k_lo + idx;
    cplx acc{};
    for (int j = 0; j < M; ++j) {
      const double ph = -2.0 * constants::pi * k * j / M;
      acc += samples[j] * std::exp(cplx(0.0, ph));
    }
    w[idx] = std::max(acc.real() / M, 0.0);
  }

  // Trim tails until their cumulative weight crosses tail_tol.
  double total = 0.0;
  for (double x : w) total += x;
  int lo = 0, hi = n_k - 1;
  double cut = 0.0;
  while (lo < hi && cut + w[lo] < 0.5 * tail_tol * total) cut += w[lo++];
  double cut_hi = 0.0;
  while (hi > lo && cut_hi + w[hi] < 0.5 * tail_tol * total) cut_hi += w[hi--];

  out.k_min = k_lo + lo;
  out.w.assign(w.begin() + lo, w.begin() + hi + 1);
  out.truncation = cut + cut_hi;
  return out;
}

cplx k_transform(const CorrelationModel& m, double Omega_nu, double delta,
                 double Gamma) {
  if (Gamma <= 0.0)
    throw std::invalid_argument(
        "k_transform: Gamma must be > 0 (damping renders the integral "
        "convergent)");
  if (Omega_nu < 0.0)
    throw std::invalid_argument("k_transform: Omega_nu must be >= 0");

  const auto sb = sideband_weights(m);
  cplx acc{};
  const double hg = 0.5 * Gamma;
  for (std::size_t j = 0; j < sb.w.size(); ++j) {
    const int k = sb.k_min + static_cast<int>(j);
    const double x = delta - k * m.Omega;
    // Int_0^inf e^{i(k Omega - delta) tau - Gamma tau / 2} dtau
    acc += sb.w[j] * cplx(hg, -x) / (x * x + hg * hg);
  }
  return Omega_nu * Omega_nu * acc;
}

double gamma_of(const CorrelationModel& m, double Omega_nu, double delta,
                double Gamma) {
  return 2.0 * k_transform(m, Omega_nu, delta, Gamma).real();
}

}  // namespace pbec::rates

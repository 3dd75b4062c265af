#pragma once

// Test-only oracles, independent of the implementation paths they check.
//
// Perfect-mirror planar cavity Im G by the method of images: two ideal
// mirrors at spacing d generate image dipoles at 2nd +- z. Parallel dipole
// components flip sign on each reflection, perpendicular ones do not, so
//   Im G_xx(z) = (k/4pi) [ 2/3 + 2 sum_{n>=1} A(2nkd)
//                          - A(2kz) - sum_{n>=1} (A(u_n^-) + A(u_n^+)) ]
//   Im G_zz(z) = (k/4pi) [ 2/3 + 2 sum_{n>=1} C(2nkd)
//                          + C(2kz) + sum_{n>=1} (C(u_n^-) + C(u_n^+)) ]
// with u_n^{+-} = 2k(nd +- z),
//   A(u) = sin u/u + cos u/u^2 - sin u/u^3   (transverse propagator trace)
//   C(u) = -2 cos u/u^2 + 2 sin u/u^3        (longitudinal part)
// The slowly convergent sin(u)/u pieces are evaluated through the classical
// Fourier series sum sin(na)/n = (pi-a)/2, sum cos(na)/n = -ln(2 sin(a/2)),
// sum cos(na)/n^2 and sum sin(na)/n^3 (Bernoulli polynomials); the remaining
// absolutely convergent pieces are summed directly with compensation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include "pbec/quadrature.hpp"

namespace pbec::test_oracles {

inline constexpr double kPi = 3.14159265358979323846;

inline double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0) a += 2.0 * kPi;
  return a;
}

// sum_{n>=1} sin(n a)/n, cos(n a)/n, cos(n a)/n^2, sin(n a)/n^3
inline double series_sin_n(double a) {
  a = wrap_2pi(a);
  if (a == 0.0) return 0.0;
  return 0.5 * (kPi - a);
}
inline double series_cos_n(double a) {
  a = wrap_2pi(a);
  return -std::log(2.0 * std::sin(0.5 * a));
}
inline double series_cos_n2(double a) {
  a = wrap_2pi(a);
  return kPi * kPi / 6.0 - 0.5 * kPi * a + 0.25 * a * a;
}
inline double series_sin_n3(double a) {
  a = wrap_2pi(a);
  return kPi * kPi * a / 6.0 - 0.25 * kPi * a * a + a * a * a / 12.0;
}

namespace detail {

struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// sum_{n>=1} sin(n a + b)/(n a + b): closed-form leading 1/(n a) part plus an
// absolutely convergent correction.
inline double series_sinc_shifted(double a, double b) {
  const double lead =
      (std::cos(b) * series_sin_n(a) + std::sin(b) * series_cos_n(a)) / a;
  Kahan corr;
  const long N = 400000;
  for (long n = 1; n <= N; ++n) {
    const double u = n * a + b;
    corr.add(-std::sin(u) * b / (n * a * u));
  }
  return lead + corr.s;
}

// sum_{n>=1} f(n a + b) for f decaying like 1/u^2 or faster, direct.
template <class F>
double series_direct(double a, double b, F&& f) {
  Kahan acc;
  const long N = 400000;
  for (long n = 1; n <= N; ++n) acc.add(f(n * a + b));
  return acc.s;
}

}  // namespace detail

// A(u) and C(u) split: sin u/u handled by the shifted-sinc series, the rest
// directly. Families: a) arguments 2nkd (b = 0, closed forms); b) 2k(nd - z)
// and 2k(nd + z) (b = -+2kz).
inline std::pair<double, double> im_greens_perfect_cavity(double k, double d,
                                                          double z) {
  const double a = 2.0 * k * d;
  const double b = 2.0 * k * z;

  auto cos_u2 = [](double u) { return std::cos(u) / (u * u); };
  auto sin_u3 = [](double u) { return std::sin(u) / (u * u * u); };

  // family 2nkd: closed forms throughout
  const double A_d = series_sin_n(a) / a + series_cos_n2(a) / (a * a) -
                     series_sin_n3(a) / (a * a * a);
  const double C_d = -2.0 * series_cos_n2(a) / (a * a) +
                     2.0 * series_sin_n3(a) / (a * a * a);

  auto A_shifted = [&](double shift) {
    return detail::series_sinc_shifted(a, shift) +
           detail::series_direct(a, shift, cos_u2) -
           detail::series_direct(a, shift, sin_u3);
  };
  auto C_shifted = [&](double shift) {
    return -2.0 * detail::series_direct(a, shift, cos_u2) +
           2.0 * detail::series_direct(a, shift, sin_u3);
  };

  auto A_of = [](double u) {
    return std::sin(u) / u + std::cos(u) / (u * u) -
           std::sin(u) / (u * u * u);
  };
  auto C_of = [](double u) {
    return -2.0 * std::cos(u) / (u * u) + 2.0 * std::sin(u) / (u * u * u);
  };

  const double xx = 2.0 / 3.0 + 2.0 * A_d -
                    (A_of(b) + A_shifted(-b) + A_shifted(+b));
  const double zz = 2.0 / 3.0 + 2.0 * C_d +
                    (C_of(b) + C_shifted(-b) + C_shifted(+b));
  const double pref = k / (4.0 * kPi);
  return {pref * xx, pref * zz};
}

// Brute-force damped half-Fourier transform of an arbitrary correlator:
// oscillatory tau-quadrature in half-period chunks out to the damping tail,
// one G7/K15 panel per chunk.
template <class Corr>
std::complex<double> k_transform_quadrature(Corr&& corr, double Omega_nu,
                                            double delta, double Gamma,
                                            double Omega) {
  using cplx = std::complex<double>;
  const double t_end = 60.0 / Gamma;
  const double chunk =
      kPi / (3.0 * std::max({std::abs(delta), Omega, Gamma}));
  auto f = [&](double t) -> cplx {
    return corr(t) * std::exp(cplx(-0.5 * Gamma * t, -delta * t));
  };
  detail::Kahan re, im;
  double a = 0.0;
  while (a < t_end) {
    const double bnd = std::min(a + chunk, t_end);
    const cplx v = pbec::quad::gk15_panel(f, a, bnd).first;
    re.add(v.real());
    im.add(v.imag());
    a = bnd;
  }
  return Omega_nu * Omega_nu * std::complex<double>(re.s, im.s);
}

}  // namespace pbec::test_oracles

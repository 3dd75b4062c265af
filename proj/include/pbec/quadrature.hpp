#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

// Adaptive Gauss-Kronrod (G7/K15) quadrature, templated over the integrand's
// value type so the same driver serves real integrands and complex ones
// (deformed-contour Green's tensor integrals, damped correlator transforms).
// Also hosts the Cauchy principal-value driver used for the Lamb-shift
// integrals: symmetric-pair subtraction around the pole with Richardson
// extrapolation over a halved exclusion radius.
namespace pbec::quad {

namespace detail {
// K15 abscissae on [0,1] half-interval (symmetric) and weights.
inline constexpr double kron_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kron_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
// Gauss-7 weights attach to kron_x[1], [3], [5], [7].
inline constexpr double gauss_w[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

template <class T>
struct Result {
  T value{};
  double error = 0.0;       // achieved absolute error estimate
  long evaluations = 0;
  bool converged = false;
};

struct Tolerance {
  double rel = 1e-10;
  double abs = 0.0;
  int max_intervals = 4000;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_error(achieved) {}
  double achieved_error;
};

// One G7/K15 panel on [a,b]; returns (K15, |K15-G7| error estimate).
template <class F, class T = std::invoke_result_t<F, double>>
std::pair<T, double> gk15_panel(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  T fk{};
  T fg{};
  for (int i = 0; i < 8; ++i) {
    const double dx = h * detail::kron_x[i];
    T v = (i == 7) ? f(m) : T(f(m - dx) + f(m + dx));
    fk += detail::kron_w[i] * v;
    if (i % 2 == 1) fg += detail::gauss_w[i / 2] * v;
  }
  fk *= h;
  fg *= h;
  const double diff = detail::magnitude(fk - fg);
  // QUADPACK-style sharpening of the raw difference.
  const double err = diff * std::min(1.0, std::pow(200.0 * diff /
                         std::max(detail::magnitude(fk), 1e-300), 0.5));
  return {fk, std::max(err, diff * 1e-6)};
}

// Globally adaptive bisection with a worst-first interval list.
template <class F, class T = std::invoke_result_t<F, double>>
Result<T> integrate(F&& f, double a, double b, Tolerance tol = {}) {
  struct Interval {
    double a, b, err;
    T val;
  };
  std::vector<Interval> ivs;
  auto [v0, e0] = gk15_panel(f, a, b);
  ivs.push_back({a, b, e0, v0});
  Result<T> out;
  out.evaluations = 15;
  for (;;) {
    T total{};
    double err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      total += ivs[i].val;
      err += ivs[i].err;
      if (ivs[i].err > ivs[worst].err) worst = i;
    }
    out.value = total;
    out.error = err;
    const double goal =
        std::max(tol.abs, tol.rel * detail::magnitude(total));
    if (err <= goal || ivs.size() >= static_cast<std::size_t>(tol.max_intervals)) {
      out.converged = err <= goal;
      return out;
    }
    Interval w = ivs[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (mid <= w.a || mid >= w.b) {  // interval at float resolution
      out.converged = false;
      return out;
    }
    auto [vl, el] = gk15_panel(f, w.a, mid);
    auto [vr, er] = gk15_panel(f, mid, w.b);
    out.evaluations += 30;
    ivs[worst] = {w.a, mid, el, vl};
    ivs.push_back({mid, w.b, er, vr});
  }
}

// Semi-infinite [a, inf) via x = a + s*t/(1-t); s sets the length scale that
// maps to t = 1/2.
template <class F, class T = std::invoke_result_t<F, double>>
Result<T> integrate_semi_infinite(F&& f, double a, double scale,
                                  Tolerance tol = {}) {
  auto g = [&](double t) -> T {
    const double u = 1.0 - t;
    const double x = a + scale * t / u;
    return f(x) * (scale / (u * u));
  };
  return integrate(g, 0.0, 1.0, tol);
}

// PV integral of f over [a,b] with a simple pole at `pole` (a < pole < b).
// f is the full integrand including the pole.
double pv_integrate(const std::function<double(double)>& f, double a, double b,
                    double pole, Tolerance tol = {});

}  // namespace pbec::quad

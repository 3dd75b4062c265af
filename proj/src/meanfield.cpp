#include "pbec/meanfield.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "pbec/constants.hpp"
#include "pbec/fitting.hpp"

namespace pbec::meanfield {

using constants::hbar;
using constants::k_B;

Derivative rhs(const MeanFieldState& state, const rates::RateSet& r,
               const std::vector<CavityMode>& modes,
               const DyeParameters& dye) {
  const std::size_t K = modes.size();
  if (state.n.size() != K || r.gamma_em.size() != K)
    throw std::invalid_argument("meanfield rhs: mode count mismatch");
  Derivative d;
  d.dn.resize(K);
  const double N = static_cast<double>(dye.n_molecules);
  const double f = state.f;
  double backaction = 0.0;
  for (std::size_t v = 0; v < K; ++v) {
    const double nv = state.n[v];
    const double exchange =
        r.gamma_em[v] * f * (nv + 1.0) - r.gamma_abs[v] * (1.0 - f) * nv;
    d.dn[v] = -modes[v].gamma_nu * nv + N * exchange;
    backaction += exchange;
  }
  d.df = r.gamma_up * (1.0 - f) - r.gamma_down * f - backaction;
  return d;
}

namespace {

struct Workspace {
  const rates::RateSet* r;
  const std::vector<CavityMode>* modes;
  const DyeParameters* dye;
  double pump;
  double scale;  // largest rate; time is measured in 1/scale units

  std::size_t K() const { return modes->size(); }

  // rhs and analytic Jacobian in rate-scaled units
  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    MeanFieldState s = unpack(x);
    rates::RateSet rr = *r;
    rr.gamma_up = pump;
    auto d = rhs(s, rr, *modes, *dye);
    Eigen::VectorXd v(K() + 1);
    for (std::size_t i = 0; i < K(); ++i) v[i] = d.dn[i] / scale;
    v[K()] = d.df / scale;
    return v;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    const std::size_t K_ = K();
    const double N = static_cast<double>(dye->n_molecules);
    const double f = x[K_];
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K_ + 1, K_ + 1);
    double df_df = -pump - r->gamma_down;
    for (std::size_t v = 0; v < K_; ++v) {
      const double nv = x[v];
      const double ge = r->gamma_em[v], ga = r->gamma_abs[v];
      const double dn_dn = -(*modes)[v].gamma_nu + N * (ge * f - ga * (1.0 - f));
      const double dn_df = N * (ge * (nv + 1.0) + ga * nv);
      J(v, v) = dn_dn / scale;
      J(v, K_) = dn_df / scale;
      J(K_, v) = -(ge * f - ga * (1.0 - f)) / scale;
      df_df -= ge * (nv + 1.0) + ga * nv;
    }
    J(K_, K_) = df_df / scale;
    return J;
  }

  MeanFieldState unpack(const Eigen::VectorXd& x) const {
    MeanFieldState s;
    s.n.assign(x.data(), x.data() + K());
    s.f = x[K()];
    return s;
  }

  static Eigen::VectorXd project(Eigen::VectorXd x) {
    for (long i = 0; i + 1 < x.size(); ++i) x[i] = std::max(x[i], 0.0);
    x[x.size() - 1] = std::clamp(x[x.size() - 1], 0.0, 1.0);
    return x;
  }
};

// Per-mode stationary population at fixed f (scalar closed form).
double mode_population(const Workspace& w, std::size_t v, double f) {
  const double N = static_cast<double>(w.dye->n_molecules);
  const double ge = w.r->gamma_em[v], ga = w.r->gamma_abs[v];
  const double gain = N * ge * f;
  const double loss =
      (*w.modes)[v].gamma_nu + N * ga * (1.0 - f) - N * ge * f;
  if (loss <= 1e-12 * w.scale) return 1e6;  // at/above threshold seed
  return std::max(gain / loss, 0.0);
}

bool newton_solve(const Workspace& w, Eigen::VectorXd& x, double tol,
                  int max_iter) {
  Eigen::VectorXd r = w.residual(x);
  double rn = r.norm();
  for (int it = 0; it < max_iter; ++it) {
    if (rn < tol) return true;
    const Eigen::MatrixXd J = w.jacobian(x);
    const Eigen::VectorXd dx = J.fullPivLu().solve(-r);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd xn = Workspace::project(x + alpha * dx);
      Eigen::VectorXd rn_vec = w.residual(xn);
      if (rn_vec.norm() < rn * (1.0 - 1e-4 * alpha) || rn_vec.norm() < tol) {
        x = xn;
        r = rn_vec;
        rn = r.norm();
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return rn < tol;
  }
  return rn < tol;
}

bool implicit_euler(const Workspace& w, Eigen::VectorXd& x, double tol,
                    double& best) {
  double h = 1.0;  // in 1/scale units
  const std::size_t n = x.size();
  for (int step = 0; step < 40000; ++step) {
    Eigen::VectorXd r = w.residual(x);
    best = std::min(best, r.norm());
    if (r.norm() < tol) return true;
    // one Newton iteration on x_new = x + h rhs(x_new)
    Eigen::VectorXd xn = x;
    bool ok = false;
    for (int inner = 0; inner < 12; ++inner) {
      const Eigen::VectorXd g = xn - x - h * w.residual(xn);
      if (g.norm() < 1e-13 * (1.0 + xn.norm())) {
        ok = true;
        break;
      }
      Eigen::MatrixXd A =
          Eigen::MatrixXd::Identity(n, n) - h * w.jacobian(xn);
      xn = Workspace::project(xn - A.fullPivLu().solve(g));
    }
    if (ok) {
      x = xn;
      h = std::min(h * 1.3, 1e7);
    } else {
      h = std::max(h * 0.25, 1e-8);
    }
  }
  return false;
}

}  // namespace

SteadyOutcome steady(const rates::RateSet& r,
                     const std::vector<CavityMode>& modes,
                     const DyeParameters& dye, double pump_gamma_up) {
  if (pump_gamma_up < 0.0)
    throw std::invalid_argument("meanfield steady: pump must be >= 0");
  const std::size_t K = modes.size();

  Workspace w;
  w.r = &r;
  w.modes = &modes;
  w.dye = &dye;
  w.pump = pump_gamma_up;
  w.scale = std::max({pump_gamma_up, r.gamma_down, 1e-300});
  for (std::size_t v = 0; v < K; ++v)
    w.scale = std::max({w.scale, modes[v].gamma_nu,
                        dye.n_molecules * r.gamma_em[v],
                        dye.n_molecules * r.gamma_abs[v]});

  const double tol = 1e-12;

  auto seed = [&](double f0) {
    Eigen::VectorXd x(K + 1);
    for (std::size_t v = 0; v < K; ++v) x[v] = mode_population(w, v, f0);
    x[K] = f0;
    return x;
  };

  const double f_bare =
      pump_gamma_up + r.gamma_down > 0.0
          ? pump_gamma_up / (pump_gamma_up + r.gamma_down)
          : 0.0;

  SteadyOutcome out;
  std::vector<Eigen::VectorXd> converged;
  for (double f0 : {f_bare, 0.5 * f_bare, std::min(1.0, 2.0 * f_bare + 0.1)}) {
    Eigen::VectorXd x = seed(f0);
    if (newton_solve(w, x, tol, 200)) converged.push_back(x);
  }

  if (!converged.empty()) {
    out.state = w.unpack(converged.front());
    out.residual = w.residual(converged.front()).norm();
    out.method = "newton";
    for (std::size_t i = 1; i < converged.size(); ++i) {
      const double diff = (converged[i] - converged.front()).norm() /
                          (1.0 + converged.front().norm());
      if (diff > 1e-6) {
        out.multiple_roots = true;
        out.warnings.push_back(
            "steady: Newton from distinct seeds disagrees (relative " +
            std::to_string(diff) + ")");
      }
    }
    return out;
  }

  // Stiff fallback.
  Eigen::VectorXd x = seed(f_bare);
  double best = std::numeric_limits<double>::infinity();
  if (implicit_euler(w, x, tol, best)) {
    out.state = w.unpack(x);
    out.residual = w.residual(x).norm();
    out.method = "implicit-euler";
    return out;
  }
  throw std::runtime_error(
      "meanfield steady: no convergence after Newton and implicit Euler "
      "(best residual " + std::to_string(best) + ")");
}

ScanResult pump_scan(const rates::RateSet& r,
                     const std::vector<CavityMode>& modes,
                     const DyeParameters& dye,
                     const std::vector<double>& pump_grid,
                     double crossing_fraction) {
  if (pump_grid.empty())
    throw std::invalid_argument("pump_scan: empty grid");
  for (std::size_t i = 1; i < pump_grid.size(); ++i)
    if (pump_grid[i] <= pump_grid[i - 1])
      throw std::invalid_argument("pump_scan: grid must be strictly increasing");

  ScanResult out;
  out.crossing_fraction = crossing_fraction;
  out.pump = pump_grid;

  auto ground_frac = [](const MeanFieldState& s) {
    double tot = 0.0;
    for (double nv : s.n) tot += nv;
    return tot > 0.0 ? s.n[0] / tot : 0.0;
  };

  for (double p : pump_grid) {
    auto so = steady(r, modes, dye, p);
    out.ground_fraction.push_back(ground_frac(so.state));
    out.states.push_back(std::move(so.state));
  }

  // locate the first crossing and refine by bisection to 1e-3 relative
  for (std::size_t i = 1; i < pump_grid.size(); ++i) {
    if (out.ground_fraction[i - 1] < crossing_fraction &&
        out.ground_fraction[i] >= crossing_fraction) {
      double lo = pump_grid[i - 1], hi = pump_grid[i];
      while ((hi - lo) > 1e-3 * hi) {
        const double mid = 0.5 * (lo + hi);
        const auto s = steady(r, modes, dye, mid);
        (ground_frac(s.state) >= crossing_fraction ? hi : lo) = mid;
      }
      out.threshold = 0.5 * (lo + hi);
      out.bracketed = true;
      break;
    }
  }
  return out;
}

BoseEinsteinFit be_fit(const MeanFieldState& state,
                       const std::vector<CavityMode>& modes) {
  BoseEinsteinFit out;
  std::vector<double> es, ys, ns;
  for (std::size_t v = 0; v < modes.size(); ++v) {
    if (v < state.n.size() && state.n[v] > 1e-6) {
      es.push_back(hbar * modes[v].omega_nu);
      ns.push_back(state.n[v]);
      ys.push_back(std::log1p(1.0 / state.n[v]));  // (hbar w - mu)/kT
    }
  }
  out.modes_used = static_cast<int>(es.size());
  if (out.modes_used < 5)
    throw std::invalid_argument(
        "be_fit: need at least 5 modes with population > 1e-6");

  const double nmax = *std::max_element(ns.begin(), ns.end());
  const double nmin = *std::min_element(ns.begin(), ns.end());
  if ((nmax - nmin) / nmax < 1e-12) {
    out.degenerate = true;
    return out;
  }

  const auto lin = fit::linear_fit(es, ys);
  if (lin.slope <= 0.0) {
    out.degenerate = true;
    return out;
  }
  out.T_eff = 1.0 / (k_B * lin.slope);
  out.mu_eff = -lin.intercept / lin.slope;

  // residual in log-population space against the fitted BE curve
  double ss = 0.0;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const double model = 1.0 / std::expm1((es[i] - out.mu_eff) /
                                          (k_B * out.T_eff));
    ss += std::pow(std::log(model) - std::log(ns[i]), 2);
  }
  out.residual = std::sqrt(ss / es.size());
  return out;
}

}  // namespace pbec::meanfield

#include "pbec/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pbec/constants.hpp"
#include "pbec/correlation.hpp"
#include "pbec/greens.hpp"
#include "pbec/meanfield.hpp"
#include "pbec/phonon_oracle.hpp"
#include "pbec/quadrature.hpp"
#include "pbec/rates.hpp"

namespace pbec::acceptance {

namespace {

using constants::c0;
using constants::eps0;
using constants::hbar;
using constants::k_B;
using constants::pi;

// State-health extremes gathered from every quantum run in the suite.
struct Health {
  double max_trace = 0.0;
  double max_herm = 0.0;
  double min_eig = 0.0;

  void absorb_state(const lindblad::QuantumState& s) {
    max_trace = std::max(max_trace, s.trace_error());
    max_herm = std::max(max_herm, s.hermiticity_error());
    min_eig = std::min(min_eig, s.min_eigenvalue());
  }
  void absorb_traj(const lindblad::Trajectory& t) {
    max_trace = std::max(max_trace, t.max_trace_error);
    max_herm = std::max(max_herm, t.max_hermiticity_error);
    min_eig = std::min(min_eig, t.min_eigenvalue);
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

DyeParameters oracle_dye() {
  DyeParameters dye;
  dye.omega10 = 1e3;  // rotating frame; only detunings matter
  dye.Omega = 1.0;
  dye.huang_rhys = 0.3;
  dye.d01 = 1e-30;
  dye.temperature = 1e-12;  // nbar = 0 to double precision
  dye.n_molecules = 1;
  return dye;
}

// ---- 1. Appendix-A decay ---------------------------------------------

CriterionResult crit_decay(const Options& opts, Health& health) {
  CriterionResult c{1, "empty-cavity decay <a†a>(t) = exp(-gamma t)", false,
                    "", 0.0, 1.0};
  const double kappa = 1.0;
  lindblad::HilbertLayout lay;
  lay.n_molecules = 0;
  lay.photon_cutoffs = {3};

  const auto a = lindblad::photon_annihilation(lay, 0);
  lindblad::SpMat H(lay.dimension(), lay.dimension());
  const double rate = opts.inject_kappa_sign_flip ? -kappa : kappa;
  auto L = lindblad::LiouvillianSpec::from_superoperator(
      lay, lindblad::superoperator_matrix(H, {{rate, a, "kappa"}}));

  auto state = lindblad::QuantumState::basis_state(lay, 1);  // Fock |1>
  lindblad::EvolveOptions eo;
  eo.t_final = 5.0 / kappa;
  eo.dt = 1e-3 / kappa;
  eo.sample_stride = 50;
  auto traj = lindblad::evolve(state, L, eo);
  health.absorb_traj(traj);

  const auto nd = lindblad::photon_number_diagonal(lay, 0);
  double worst = 0.0;
  for (const auto& p : traj.points) {
    const double expect = std::exp(-kappa * p.t);
    worst = std::max(worst, std::abs(p.n_photon[0] - expect) / expect);
  }
  c.pass = worst < 1e-6;
  c.detail = "max relative deviation " + num(worst) + " (tol 1e-6)";
  return c;
}

// ---- 2. Lineshape universality ---------------------------------------

CriterionResult crit_lineshapes() {
  CriterionResult c{2, "lineshape integrals reach pi t/2 at gamma t = 1e3",
                    false, "", 0.0, 1.0};
  const double gamma = 1.0, t = 1e3;
  const double target = 0.5 * pi * t;
  const double vr = rates::lineshape_limit(Lineshape::Rectangular, gamma, t);
  const double vg = rates::lineshape_limit(Lineshape::Gaussian, gamma, t);
  const double vl = rates::lineshape_limit(Lineshape::Lorentzian, gamma, t);
  double worst = 0.0;
  for (double v : {vr, vg, vl})
    worst = std::max(worst, std::abs(v - target) / target);
  double pairwise = 0.0;
  for (double a : {vr, vg, vl})
    for (double b : {vr, vg, vl})
      pairwise = std::max(pairwise, std::abs(a - b) / target);
  c.pass = worst < 0.01 && pairwise < 0.01;
  c.detail = "vs pi t/2: rect " + num(vr / target) + ", gauss " +
             num(vg / target) + ", lorentz " + num(vl / target) +
             "; worst " + num(worst) + ", pairwise " + num(pairwise) +
             " (tol 0.01)";
  return c;
}

// ---- 3. Pump formula ---------------------------------------------------

CriterionResult crit_pump_formula() {
  CriterionResult c{3, "Gamma_up = pi d01^2 I0/(c eps0 hbar^2), "
                       "lineshape-independent", false, "", 0.0, 0.0};
  DyeParameters dye;
  dye.omega10 = 2.4e15;
  dye.Omega = 1.5e13;
  dye.d01 = 3.34e-30;
  dye.temperature = 300.0;

  LaserSpec laser;
  laser.I0 = 1e7;
  laser.gamma_L = 1e12;
  laser.omega_L = dye.omega10;

  // independent arithmetic route: Gamma_up = 2 pi mu^2(omega10)
  const double mu2 = dye.d01 * dye.d01 * laser.I0 / (2.0 * c0 * eps0 *
                                                     hbar * hbar);
  const double reference = 2.0 * pi * mu2;

  double vals[3];
  int i = 0;
  for (auto shape :
       {Lineshape::Rectangular, Lineshape::Gaussian, Lineshape::Lorentzian}) {
    laser.lineshape = shape;
    vals[i++] = rates::gamma_up(laser, dye);
  }
  const bool bitwise =
      std::memcmp(&vals[0], &vals[1], sizeof(double)) == 0 &&
      std::memcmp(&vals[0], &vals[2], sizeof(double)) == 0;
  const double rel = std::abs(vals[0] - reference) / reference;
  c.pass = rel < 1e-12 && bitwise;
  c.detail = "relative error " + num(rel) + " (tol 1e-12), bit-identical "
             "across lineshapes: " + (bitwise ? "yes" : "NO");
  return c;
}

// ---- 4. Free-space spontaneous emission -------------------------------

CriterionResult crit_free_space() {
  CriterionResult c{4, "free-space Gamma_down vs omega^3 d^2/(3 pi eps0 "
                       "hbar c^3); mirrorless cavity = free space", false,
                    "", 0.0, 10.0};
  DyeParameters dye;
  dye.Omega = 1e12;
  dye.d01 = constants::debye;
  dye.temperature = 300.0;

  GeometrySpec fs;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double w = 1e14 * std::pow(100.0, i / 19.0);  // up to 1e16
    dye.omega10 = w;
    const double got = greens::gamma_down_total(dye, fs);
    const double expect =
        w * w * w * dye.d01 * dye.d01 / (3.0 * pi * eps0 * hbar * c0 * c0 * c0);
    worst = std::max(worst, std::abs(got - expect) / expect);
  }

  GeometrySpec cav;
  cav.kind = GeometryKind::PlanarCavity;
  cav.cavity_length = 2e-6;
  cav.emitter_z = 0.7e-6;
  dye.omega10 = 2.4e15;
  const double g_cav = greens::gamma_down_total(dye, cav);
  const double g_fs = greens::gamma_down_total(dye, fs);
  const double mirrorless = std::abs(g_cav - g_fs) / g_fs;

  c.pass = worst < 1e-10 && mirrorless < 1e-8;
  c.detail = "max relative error " + num(worst) +
             " (tol 1e-10); r=0 cavity vs free space " + num(mirrorless) +
             " (quadrature tolerance 1e-8)";
  return c;
}

// ---- 5. Stage-2 closed form and sum rule -------------------------------

CriterionResult crit_stage2() {
  CriterionResult c{5, "S=0 Lorentzian closed form; sum rule "
                       "int Gamma(delta) = 2 pi Omega_nu^2", false, "", 0.0,
                    30.0};
  const double Omega = 1.5e13;
  const double W = 1.0;  // Omega_nu scales out of relative checks

  // closed form on a 100-point (delta, Gamma) grid
  auto m0 = rates::CorrelationModel::make(0.0, Omega, 300.0);
  double worst_cf = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double delta = (-4.5 + i) * 0.6 * Omega;
      const double G = Omega * std::pow(10.0, -4.0 + j * 0.45);
      const double got = rates::gamma_of(m0, W, delta, G);
      const double expect = W * W * G / (delta * delta + 0.25 * G * G);
      worst_cf = std::max(worst_cf, std::abs(got - expect) / expect);
    }

  // sum rule over S and T
  double worst_sum = 0.0;
  for (double S : {0.0, 0.3, 1.0})
    for (double T : {0.0, 300.0}) {
      auto m = rates::CorrelationModel::make(S, Omega, T);
      const double G = 0.05 * Omega;
      auto f = [&](double u) {
        const double delta = 0.5 * G * std::tan(u);
        const double jac = 0.5 * G / std::pow(std::cos(u), 2);
        return rates::gamma_of(m, W, delta, G) * jac;
      };
      quad::Tolerance tol;
      tol.rel = 1e-8;
      tol.max_intervals = 20000;
      const double integral =
          quad::integrate(f, -0.5 * pi + 1e-14, 0.5 * pi - 1e-14, tol).value;
      const double expect = 2.0 * pi * W * W;
      worst_sum = std::max(worst_sum, std::abs(integral - expect) / expect);
    }

  c.pass = worst_cf < 1e-10 && worst_sum < 1e-6;
  c.detail = "closed form worst " + num(worst_cf) +
             " (tol 1e-10); sum rule worst " + num(worst_sum) + " (tol 1e-6)";
  return c;
}

// ---- 6. Kennard-Stepanov ------------------------------------------------

CriterionResult crit_kennard_stepanov() {
  CriterionResult c{6, "detailed balance at delta = +-Omega, T = 300 K",
                    false, "", 0.0, 30.0};
  const double T = 300.0;
  const double Omega = 5.0 * k_B * T / hbar;
  const double S = 0.3;
  const double G = 1e-3 * Omega;
  auto model = rates::CorrelationModel::make(S, Omega, T);

  // orientation from the T = 0 zero-phonon criterion
  auto frozen = rates::CorrelationModel::make(S, Omega, 0.0);
  const double gp = rates::gamma_of(frozen, 1.0, +Omega, G);
  const double gm = rates::gamma_of(frozen, 1.0, -Omega, G);
  const int s = gm < gp ? +1 : -1;
  const bool zero_phonon_ok = std::min(gp, gm) < 1e-4 * std::max(gp, gm);

  const double tol = std::max(1e-2, 5.0 * G / Omega);
  double worst = 0.0;
  for (double delta : {+Omega, -Omega}) {
    const double ratio = rates::gamma_of(model, 1.0, delta, G) /
                         rates::gamma_of(model, 1.0, -delta, G);
    const double expect = std::exp(s * hbar * delta / (k_B * T));
    worst = std::max(worst, std::abs(ratio / expect - 1.0));
  }
  c.pass = worst < tol && zero_phonon_ok;
  c.detail = "orientation s = " + std::to_string(s) +
             ", forbidden/allowed at T=0: " + num(std::min(gp, gm) /
             std::max(gp, gm)) + " (tol 1e-4); |ratio/exp - 1| = " +
             num(worst) + " (tol " + num(tol) + ")";
  return c;
}

// ---- 7. Explicit-phonon oracle -----------------------------------------

CriterionResult crit_phonon_oracle(Health& health) {
  CriterionResult c{7, "explicit-phonon model vs nested Gamma(+-delta)",
                    false, "", 0.0, 300.0};
  lindblad::PhononOracleConfig cfg;
  cfg.dye = oracle_dye();
  cfg.omega_nu = cfg.dye.omega10 - cfg.dye.Omega;  // delta = -Omega
  cfg.kappa = 5e-3;
  cfg.gamma_down = 3e-3;
  cfg.gamma_up = 2e-3;
  cfg.coupling = 2e-4;
  cfg.photon_cutoff = 2;
  cfg.phonon_cutoff = 20;

  const auto rep = lindblad::explicit_phonon_oracle(cfg, true, 45);
  health.max_trace = std::max(health.max_trace, rep.trace_error);
  health.max_herm = std::max(health.max_herm, rep.hermiticity_error);
  health.min_eig = std::min(health.min_eig, rep.min_eigenvalue);

  const double Gamma = cfg.kappa + cfg.gamma_down + cfg.gamma_up;
  c.pass = rep.rel_deviation < 0.10 && rep.max_peak_mismatch < Gamma &&
           rep.phonon_leakage < 1e-6;
  c.detail = "steady <a†a>: explicit " + num(rep.n_explicit) + ", nested " +
             num(rep.n_nested) + ", deviation " + num(rep.rel_deviation) +
             " (tol 0.10); peak mismatch " + num(rep.max_peak_mismatch) +
             " vs Gamma " + num(Gamma) + "; phonon leakage " +
             num(rep.phonon_leakage);
  return c;
}

// ---- 8. Mean-field validity ---------------------------------------------

CriterionResult crit_meanfield_validity(Health& health) {
  CriterionResult c{8, "mean-field steady photon number vs full Lindblad",
                    false, "", 0.0, 60.0};
  DyeParameters dye = oracle_dye();
  dye.huang_rhys = 0.0;

  const double kappa = 1.0, gd = 0.5, gu = 0.4;
  const double Gamma = kappa + gd + gu;
  const double W = 0.1 * Gamma;  // Omega_nu / Gamma = 0.1
  auto model = rates::CorrelationModel::from_dye(dye);

  CavityMode mode;
  mode.omega_nu = dye.omega10;  // delta = 0
  mode.gamma_nu = kappa;
  mode.Omega_nu = W;

  rates::RateSet rs;
  rs.kappa = kappa;
  rs.gamma_down = gd;
  rs.gamma_up = gu;
  rs.Gamma = Gamma;
  const auto Ka = rates::k_transform(model, W, 0.0, Gamma);
  rs.gamma_abs = {2.0 * Ka.real()};
  rs.gamma_em = {2.0 * Ka.real()};
  rs.kpp_abs = {Ka.imag()};
  rs.kpp_em = {Ka.imag()};

  lindblad::HilbertLayout lay;
  lay.n_molecules = 1;
  lay.photon_cutoffs = {6};
  auto L = lindblad::build_liouvillian(lay, rs, {mode}, dye);
  auto st = lindblad::steady_state(L);
  health.absorb_state(st.state);
  const double n_quantum = st.state.expect_diagonal(
      lindblad::photon_number_diagonal(lay, 0));

  auto mf = meanfield::steady(rs, {mode}, dye, gu);
  const double n_mf = mf.state.n[0];
  const double dev = std::abs(n_mf - n_quantum) / n_quantum;
  c.pass = dev < 0.15;
  c.detail = "n quantum " + num(n_quantum) + ", mean-field " + num(n_mf) +
             ", deviation " + num(dev) + " (tol 0.15, Omega_nu/Gamma = 0.1)";
  return c;
}

// ---- 9. Thermalization ----------------------------------------------------

struct ThermalConfig {
  DyeParameters dye;
  std::vector<CavityMode> modes;
  rates::RateSet rs;
};

// 20-mode reference: kappa_nu = 1e-3 Gamma(delta_nu), detailed-balance limit.
ThermalConfig thermal_config(double kappa_ratio, double ground_kappa_scale) {
  ThermalConfig tc;
  tc.dye.omega10 = 2.4e15;
  tc.dye.temperature = 300.0;
  tc.dye.Omega = 0.4 * k_B * tc.dye.temperature / hbar;
  tc.dye.huang_rhys = 0.25;
  tc.dye.d01 = constants::debye;
  tc.dye.n_molecules = 1;

  const double X = 0.25 * tc.dye.Omega;  // Gamma scale
  const double gu = 0.2 * X, gd = 0.8 * X;
  const double Gamma = gu + gd;
  const double W = 0.05 * X;
  auto model = rates::CorrelationModel::from_dye(tc.dye);

  tc.rs.gamma_up = gu;
  tc.rs.gamma_down = gd;
  tc.rs.Gamma = Gamma;
  for (int j = 0; j < 20; ++j) {
    const double delta = (-2.0 + 0.18 * j) * tc.dye.Omega;
    const auto Ka = rates::k_transform(model, W, delta, Gamma);
    const auto Ke = rates::k_transform(model, W, -delta, Gamma);
    CavityMode m;
    m.index = j;
    m.omega_nu = tc.dye.omega10 + delta;
    m.Omega_nu = W;
    m.gamma_nu = kappa_ratio * 2.0 * Ka.real();
    if (j == 0) m.gamma_nu *= ground_kappa_scale;
    tc.modes.push_back(m);
    tc.rs.gamma_abs.push_back(2.0 * Ka.real());
    tc.rs.gamma_em.push_back(2.0 * Ke.real());
    tc.rs.kpp_abs.push_back(Ka.imag());
    tc.rs.kpp_em.push_back(Ke.imag());
  }
  tc.rs.kappa = tc.modes.front().gamma_nu;
  return tc;
}

CriterionResult crit_thermalization() {
  CriterionResult c{9, "20-mode sub-threshold BE fit recovers the dye "
                       "temperature", false, "", 0.0, 120.0};
  auto tc = thermal_config(1e-3, 1.0);
  auto so = meanfield::steady(tc.rs, tc.modes, tc.dye, tc.rs.gamma_up);
  double tot = 0.0;
  for (double nv : so.state.n) tot += nv;
  const double ground_frac = so.state.n[0] / tot;

  const auto fit = meanfield::be_fit(so.state, tc.modes);
  const double dev = std::abs(fit.T_eff - tc.dye.temperature) /
                     tc.dye.temperature;
  c.pass = dev < 0.05 && ground_frac < 0.5 && !fit.degenerate;
  c.detail = "T_eff " + num(fit.T_eff) + " K vs 300 K, deviation " +
             num(dev) + " (tol 0.05); log-space residual " +
             num(fit.residual) + "; ground fraction " + num(ground_frac) +
             " (sub-threshold)";
  return c;
}

// ---- 10. Threshold ---------------------------------------------------------

CriterionResult crit_threshold() {
  CriterionResult c{10, "pump scan brackets a threshold; monotone ground "
                        "fraction; lower ground kappa lowers it", false, "",
                    0.0, 300.0};
  auto tc = thermal_config(0.10, 1.0);
  std::vector<double> grid;
  for (int i = 0; i < 24; ++i)
    grid.push_back(tc.rs.gamma_down * (0.05 + 0.10 * i));

  auto scan = meanfield::pump_scan(tc.rs, tc.modes, tc.dye, grid, 0.5);
  bool monotone = true;
  for (std::size_t i = 1; i < scan.ground_fraction.size(); ++i)
    if (scan.ground_fraction[i] < scan.ground_fraction[i - 1] - 1e-9)
      monotone = false;

  auto tc_low = thermal_config(0.10, 0.1);  // ground-mode kappa / 10
  auto scan_low = meanfield::pump_scan(tc_low.rs, tc_low.modes, tc_low.dye,
                                       grid, 0.5);

  const bool both = scan.bracketed && scan_low.bracketed;
  const bool lower =
      both && *scan_low.threshold < *scan.threshold;
  c.pass = scan.bracketed && monotone && lower;
  std::string thr = scan.threshold ? num(*scan.threshold) : "none";
  std::string thr_low = scan_low.threshold ? num(*scan_low.threshold) : "none";
  c.detail = "threshold " + thr + " rad/s (bracketed: " +
             (scan.bracketed ? "yes" : "NO") + "), monotone: " +
             (monotone ? "yes" : "NO") + ", with kappa_0/10: " + thr_low +
             (lower ? " (lower)" : " (NOT lower)");
  return c;
}

// ---- 11. State health -------------------------------------------------------

CriterionResult crit_health(const Health& h) {
  CriterionResult c{11, "state health across all acceptance trajectories",
                    false, "", 0.0, 0.0};
  c.pass = h.max_trace < 1e-9 && h.max_herm < 1e-12 && h.min_eig >= -1e-10;
  c.detail = "max trace error " + num(h.max_trace) +
             " (tol 1e-9); max hermiticity error " + num(h.max_herm) +
             " (tol 1e-12); min eigenvalue " + num(h.min_eig) +
             " (tol -1e-10)";
  return c;
}

}  // namespace

Report run_all(const Options& opts, std::ostream* progress) {
  Report rep;
  Health health;

  int next_id = 0;
  auto timed = [&](auto&& fn) {
    ++next_id;
    if (opts.only != 0 && opts.only != next_id) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult c = fn();
    c.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (c.budget_s > 0.0 && c.runtime_s > c.budget_s) {
      c.pass = false;
      c.detail += " [runtime " + num(c.runtime_s) + " s exceeded budget " +
                  num(c.budget_s) + " s]";
    }
    if (progress)
      *progress << (c.pass ? "PASS" : "FAIL") << "  [" << c.id << "] "
                << c.name << " -- " << c.detail << " (" << num(c.runtime_s)
                << " s)\n"
                << std::flush;
    rep.results.push_back(std::move(c));
  };

  timed([&] { return crit_decay(opts, health); });
  timed([&] { return crit_lineshapes(); });
  timed([&] { return crit_pump_formula(); });
  timed([&] { return crit_free_space(); });
  timed([&] { return crit_stage2(); });
  timed([&] { return crit_kennard_stepanov(); });
  timed([&] { return crit_phonon_oracle(health); });
  timed([&] { return crit_meanfield_validity(health); });
  timed([&] { return crit_thermalization(); });
  timed([&] { return crit_threshold(); });
  timed([&] { return crit_health(health); });

  rep.all_pass = true;
  for (const auto& c : rep.results) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

std::string to_json(const Report& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass;
  auto arr = nlohmann::json::array();
  for (const auto& c : report.results)
    arr.push_back({{"id", c.id},
                   {"name", c.name},
                   {"pass", c.pass},
                   {"detail", c.detail},
                   {"runtime_s", c.runtime_s},
                   {"budget_s", c.budget_s}});
  j["criteria"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace pbec::acceptance

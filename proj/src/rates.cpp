#include "pbec/rates.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "pbec/constants.hpp"
#include "pbec/quadrature.hpp"

namespace pbec::rates {

using constants::c0;
using constants::eps0;
using constants::hbar;
using constants::k_B;
using constants::pi;

double kappa_from_mode(const CavityMode& mode) {
  mode.validate();
  return mode.gamma_nu;
}

double gamma_up(const LaserSpec& laser, const DyeParameters& dye) {
  laser.validate();
  dye.validate();
  return pi * dye.d01 * dye.d01 * laser.I0 / (c0 * eps0 * hbar * hbar);
}

namespace {

double lineshape_value(Lineshape shape, double gamma_L, double w) {
  switch (shape) {
    case Lineshape::Rectangular:
      return std::abs(w) <= 0.5 * gamma_L ? 1.0 : 0.0;
    case Lineshape::Gaussian:
      return std::exp(-0.5 * w * w / (gamma_L * gamma_L));
    case Lineshape::Lorentzian: {
      const double q = 0.25 * gamma_L * gamma_L;
      return q / (w * w + q);
    }
  }
  return 0.0;
}

double lineshape_span(Lineshape shape, double gamma_L, double t) {
  switch (shape) {
    case Lineshape::Rectangular:
      return 0.5 * gamma_L;
    case Lineshape::Gaussian:
      return 12.0 * gamma_L;
    case Lineshape::Lorentzian: {
      // omega^-4 tail; span chosen so the dropped tail is < 1e-9 of pi t/2.
      const double gt = std::max(gamma_L * t, 1e-9);
      return gamma_L * std::max(20.0, std::cbrt(1.0 / (12.0 * pi * 1e-9 * gt)) + 5.0);
    }
  }
  return 0.0;
}

}  // namespace

double lineshape_limit(Lineshape shape, double gamma_L, double t) {
  if (t <= 0.0) throw std::invalid_argument("lineshape_limit: t must be > 0");
  if (gamma_L <= 0.0)
    throw std::invalid_argument("lineshape_limit: gamma_L must be > 0");

  // sin^2(w t/2)/w^2 written through sinc so the w -> 0 limit t^2/4 is exact.
  auto integrand = [&](double w) {
    const double u = 0.5 * w * t;
    const double sinc = std::abs(u) < 1e-8 ? 1.0 : std::sin(u) / u;
    return lineshape_value(shape, gamma_L, w) * 0.25 * t * t * sinc * sinc;
  };

  const double span = lineshape_span(shape, gamma_L, t);
  const double chunk = pi / t;  // half oscillation period in omega
  double acc = 0.0, comp = 0.0;
  quad::Tolerance tol;
  tol.rel = 1e-10;
  double a = 0.0;
  while (a < span) {
    const double b = std::min(a + chunk, span);
    const double piece = quad::gk15_panel(integrand, a, b).first;
    const double y = piece - comp;  // Kahan
    const double s = acc + y;
    comp = (s - acc) - y;
    acc = s;
    a = b;
  }
  return 2.0 * acc;  // even integrand, full line
}

double light_shift(const LaserSpec& laser, const DyeParameters& dye) {
  laser.validate();
  dye.validate();
  if (laser.I0 == 0.0) return 0.0;

  const double pole = dye.omega10;
  auto intensity = [&](double w) {
    return laser.I0 * lineshape_value(laser.lineshape, laser.gamma_L,
                                      w - laser.omega_L);
  };
  auto f = [&](double w) { return intensity(w) / (w - pole); };

  const double span = lineshape_span(laser.lineshape, laser.gamma_L, 1.0 /
                                     laser.gamma_L);
  double a = std::max(laser.omega_L - span, 1e-6 * dye.omega10);
  double b = laser.omega_L + span;

  double integral = 0.0;
  quad::Tolerance tol;
  tol.rel = 1e-10;
  if (pole > a && pole < b) {
    integral = quad::pv_integrate(f, a, b, pole, tol);
  } else {
    integral = quad::integrate(f, a, b, tol).value;
  }
  return dye.d01 * dye.d01 / (2.0 * c0 * eps0 * hbar * hbar) * integral;
}

AssembledRates assemble_rates(const DyeParameters& dye, const LaserSpec& laser,
                              const GeometrySpec& geometry,
                              const AssembleOptions& options) {
  AssembledRates out;
  dye.validate(&out.warnings);
  laser.validate();

  if (options.user_modes) {
    out.modes = *options.user_modes;
    for (const auto& m : out.modes) m.validate();
    std::sort(out.modes.begin(), out.modes.end(),
              [](const CavityMode& a, const CavityMode& b) {
                return a.omega_nu < b.omega_nu;
              });
  } else {
    const double lo = options.scan_lo > 0.0 ? options.scan_lo : 0.5 * dye.omega10;
    const double hi = options.scan_hi > 0.0 ? options.scan_hi : 1.5 * dye.omega10;
    out.modes = greens::extract_modes(geometry, dye, lo, hi,
                                      options.max_modes, options.quad);
  }

  RateSet& r = out.rates;

  if (options.gamma_down_tot_override) {
    r.gamma_down_tot = *options.gamma_down_tot_override;
  } else if (options.user_modes) {
    throw std::invalid_argument(
        "assemble_rates: user-supplied modes bypass the Green's tensor; "
        "gamma_down_tot_override is required");
  } else {
    r.gamma_down_tot = greens::gamma_down_total(
        dye, geometry, options.isotropic_dipole, options.quad);
  }

  const auto res = gamma_down_resonant(out.modes, dye);
  r.gamma_down_res = res.rate;
  r.delta_gamma_down_res = res.shift;
  r.gamma_down = r.gamma_down_tot - r.gamma_down_res;
  if (r.gamma_down < -1e-10 * std::max(r.gamma_down_tot, 1e-300))
    throw std::runtime_error(
        "assemble_rates: net decay Gamma_down = Gamma_tot - Gamma_res is "
        "negative (invariant breach)");
  r.gamma_down = std::max(r.gamma_down, 0.0);

  r.gamma_up = gamma_up(laser, dye);
  r.delta_gamma_up = light_shift(laser, dye);
  r.delta_kappa = options.delta_kappa;

  if (options.kappa_override) {
    r.kappa = *options.kappa_override;
  } else {
    r.kappa = out.modes.empty() ? 0.0 : out.modes.front().gamma_nu;
  }
  r.Gamma = r.kappa + r.gamma_down + r.gamma_up;

  const std::size_t n = out.modes.size();
  r.gamma_abs.assign(n, 0.0);
  r.gamma_em.assign(n, 0.0);
  r.kpp_abs.assign(n, 0.0);
  r.kpp_em.assign(n, 0.0);
  out.omega_nu_shifted.assign(n, 0.0);
  out.cross_shift.assign(n, 0.0);
  out.omega10_shifted = dye.omega10;

  if (n > 0) {
    if (r.Gamma <= 0.0)
      throw std::runtime_error(
          "assemble_rates: Gamma = kappa + Gamma_down + Gamma_up must be > 0 "
          "to damp the stage-2 transforms");
    const auto model = CorrelationModel::from_dye(dye);
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = out.modes[i].delta_nu(dye.omega10);
      const cplx Ka = k_transform(model, out.modes[i].Omega_nu, delta, r.Gamma);
      const cplx Ke = k_transform(model, out.modes[i].Omega_nu, -delta, r.Gamma);
      r.gamma_abs[i] = 2.0 * Ka.real();
      r.gamma_em[i] = 2.0 * Ke.real();
      r.kpp_abs[i] = Ka.imag();
      r.kpp_em[i] = Ke.imag();
      // H'_S: the molecule collects one K''(-delta) shift per mode; each
      // mode is shifted once per molecule (same reading as the kappa sum).
      out.omega10_shifted += r.kpp_em[i];
      out.omega_nu_shifted[i] =
          out.modes[i].omega_nu + dye.n_molecules * r.kpp_abs[i];
      out.cross_shift[i] = r.kpp_em[i] - r.kpp_abs[i];
    }
  }
  return out;
}

KennardStepanovReport kennard_stepanov_check(
    const RateSet& rates, const std::vector<CavityMode>& modes,
    const DyeParameters& dye) {
  KennardStepanovReport rep;
  const auto model = CorrelationModel::from_dye(dye);

  if (model.S > 0.0) {
    // T = 0 zero-phonon criterion: the energy-forbidden side at delta = -Omega
    // must be suppressed; that fixes the exponent orientation globally.
    const auto frozen = CorrelationModel::make(model.S, model.Omega, 0.0);
    const double probe = 1e-3 * model.Omega;
    const double g_plus = gamma_of(frozen, 1.0, +model.Omega, probe);
    const double g_minus = gamma_of(frozen, 1.0, -model.Omega, probe);
    rep.orientation = g_minus < g_plus ? +1 : -1;
    if (std::min(g_plus, g_minus) > 1e-4 * std::max(g_plus, g_minus))
      rep.flags.push_back(
          "T=0 zero-phonon criterion is marginal; orientation may be "
          "unreliable");
  } else {
    rep.orientation = +1;
    rep.flags.push_back("S = 0: spectrum symmetric, orientation defaulted");
  }

  const double kT = k_B * dye.temperature;
  rep.regime_valid = rates.Gamma < 0.1 * dye.Omega &&
                     hbar * rates.Gamma < 0.1 * kT;
  if (!rep.regime_valid)
    rep.flags.push_back(
        "outside the sharp-relation regime (Gamma not << Omega, kT/hbar)");

  for (std::size_t i = 0; i < modes.size(); ++i) {
    KennardStepanovEntry e;
    e.delta_nu = modes[i].delta_nu(dye.omega10);
    const double expo = rep.orientation * hbar * e.delta_nu / kT;
    if (std::abs(expo) > 700.0 || rates.gamma_em[i] <= 0.0) {
      rep.flags.push_back("mode " + std::to_string(i) +
                          ": ratio out of floating-point range, skipped");
      continue;
    }
    e.ratio = rates.gamma_abs[i] / rates.gamma_em[i] / std::exp(expo);
    e.deviation = std::abs(e.ratio - 1.0);
    rep.entries.push_back(e);
  }
  return rep;
}

std::string RateSet::to_json() const {
  nlohmann::json j;
  j["kappa"] = kappa;
  j["gamma_up"] = gamma_up;
  j["gamma_down_tot"] = gamma_down_tot;
  j["gamma_down_res"] = gamma_down_res;
  j["gamma_down"] = gamma_down;
  j["Gamma"] = Gamma;
  j["gamma_abs"] = gamma_abs;
  j["gamma_em"] = gamma_em;
  j["kpp_abs"] = kpp_abs;
  j["kpp_em"] = kpp_em;
  j["delta_kappa"] = delta_kappa;
  j["delta_gamma_up"] = delta_gamma_up;
  return j.dump(2) + "\n";
}

RateSet RateSet::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RateSet r;
  r.kappa = j.at("kappa").get<double>();
  r.gamma_up = j.at("gamma_up").get<double>();
  r.gamma_down_tot = j.at("gamma_down_tot").get<double>();
  r.gamma_down_res = j.at("gamma_down_res").get<double>();
  r.gamma_down = j.at("gamma_down").get<double>();
  r.Gamma = j.at("Gamma").get<double>();
  r.gamma_abs = j.at("gamma_abs").get<std::vector<double>>();
  r.gamma_em = j.at("gamma_em").get<std::vector<double>>();
  r.kpp_abs = j.at("kpp_abs").get<std::vector<double>>();
  r.kpp_em = j.at("kpp_em").get<std::vector<double>>();
  r.delta_kappa = j.at("delta_kappa").get<double>();
  r.delta_gamma_up = j.at("delta_gamma_up").get<double>();
  return r;
}

}  // namespace pbec::rates

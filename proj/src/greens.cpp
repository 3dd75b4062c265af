#include "pbec/greens.hpp"

#include <algorithm>
#include <cmath>

#include "pbec/constants.hpp"
#include "pbec/fitting.hpp"
#include "pbec/quadrature.hpp"

namespace pbec::greens {

namespace {

using cplx = std::complex<double>;
using constants::c0;
using constants::hbar;
using constants::mu0;
using constants::pi;

struct ScatteringIntegrand {
  double k;        // in-medium wavenumber
  double z, d;
  cplx r1s, r2s, r1p, r2p;

  // Parallel (xx=yy) and perpendicular (zz) integrand parts at complex
  // transverse wavenumber kp; the measure dkp is supplied by the caller.
  // xx: (i/8pi)(kp/kz)[S_s - (kz^2/k^2) S_p^-]
  // zz: (i/4pi)(kp/kz)(kp^2/k^2) S_p^+
  void eval(cplx kp, cplx kz, cplx& f_xx, cplx& f_zz) const {
    const cplx phi1 = std::exp(2.0 * cplx(0, 1) * kz * z);
    const cplx phi2 = std::exp(2.0 * cplx(0, 1) * kz * (d - z));
    const cplx phid = std::exp(2.0 * cplx(0, 1) * kz * d);
    const cplx Ds = 1.0 - r1s * r2s * phid;
    const cplx Dp = 1.0 - r1p * r2p * phid;
    const cplx Ss = (r1s * phi1 + r2s * phi2 + 2.0 * r1s * r2s * phid) / Ds;
    const cplx Spm = (r1p * phi1 + r2p * phi2 - 2.0 * r1p * r2p * phid) / Dp;
    const cplx Spp = (r1p * phi1 + r2p * phi2 + 2.0 * r1p * r2p * phid) / Dp;
    const cplx i8 = cplx(0, 1) / (8.0 * pi);
    const double k2 = k * k;
    f_xx = i8 * (kp / kz) * (Ss - (kz * kz / k2) * Spm);
    f_zz = 2.0 * i8 * (kp / kz) * (kp * kp / k2) * Spp;
  }
};

// Propagating segment. The path runs from kp = 0 to kp = k below the real
// axis, kp(t) = k [t - iA t(1-t)], reparametrized by t = 1-u^2 so that the
// 1/kz branch-point singularity at kp = k is absorbed into the measure.
// Poles of 1/D lie in the upper half plane for any |r1 r2| <= 1, so the
// deformed path never pinches them.
template <class Part>
quad::Result<cplx> propagating_part(const ScatteringIntegrand& s, Part part,
                                    quad::Tolerance tol) {
  constexpr double A = 0.5;
  auto f = [&](double u) -> cplx {
    const double t = 1.0 - u * u;
    const cplx kp = s.k * cplx(t, -A * t * (1.0 - t));
    const cplx dkp_du = s.k * (cplx(-2.0 * u, 0) -
                               cplx(0, A) * (2.0 * u - 4.0 * u * u * u));
    const cplx kz = std::sqrt(s.k * s.k - kp * kp);
    cplx fxx, fzz;
    s.eval(kp, kz, fxx, fzz);
    return part(fxx, fzz) * dkp_du;
  };
  // u: 1 -> 0 corresponds to t: 0 -> 1; flip sign to integrate u in [0,1].
  auto r = quad::integrate(f, 0.0, 1.0, tol);
  r.value = -r.value;
  return r;
}

// Evanescent segment kp in [k, inf): substitute kp = sqrt(k^2 + q^2) with
// kz = iq, so dkp = (q/kp) dq and every phase factor decays in q. Real
// reflection coefficients contribute nothing here (the integrand is real
// before the overall Im); absorbing mirrors do.
template <class Part>
quad::Result<cplx> evanescent_part(const ScatteringIntegrand& s, Part part,
                                   quad::Tolerance tol) {
  const double zmin = std::max(std::min(s.z, s.d - s.z), 1e-6 * s.d);
  const double qmax = 60.0 / (2.0 * zmin);
  auto f = [&](double q) -> cplx {
    const cplx kp = std::sqrt(cplx(s.k * s.k + q * q, 0.0));
    const cplx kz(0.0, q);
    cplx fxx, fzz;
    s.eval(kp, kz, fxx, fzz);
    return part(fxx, fzz) * (q / kp);
  };
  return quad::integrate(f, 0.0, qmax, tol);
}

double in_medium_k(const GeometrySpec& g, double omega) {
  return std::sqrt(g.background_eps) * omega / c0;
}

}  // namespace

double axial_response(const GeometrySpec& g, double omega) {
  g.validate();
  const double k = in_medium_k(g, omega);
  const double z = g.emitter_z, d = g.cavity_length;
  const cplx kz(k, 0.0);
  const cplx phi1 = std::exp(2.0 * cplx(0, 1) * kz * z);
  const cplx phi2 = std::exp(2.0 * cplx(0, 1) * kz * (d - z));
  const cplx phid = std::exp(2.0 * cplx(0, 1) * kz * d);
  const cplx rr = g.rs1() * g.rs2();
  const cplx Ss =
      (g.rs1() * phi1 + g.rs2() * phi2 + 2.0 * rr * phid) / (1.0 - rr * phid);
  return Ss.real();
}

GreensEvaluation im_greens(const GeometrySpec& g, double omega,
                           const QuadratureOptions& opts) {
  if (omega <= 0.0) throw std::invalid_argument("im_greens: omega must be > 0");
  g.validate();

  GreensEvaluation out;
  out.omega = omega;

  if (g.kind == GeometryKind::FreeSpace) {
    out.imG = (omega / (6.0 * pi * c0)) * Eigen::Matrix3d::Identity();
    return out;
  }

  const double n = std::sqrt(g.background_eps);
  const double free_diag = n * omega / (6.0 * pi * c0);
  out.imG = free_diag * Eigen::Matrix3d::Identity();

  ScatteringIntegrand s;
  s.k = in_medium_k(g, omega);
  s.z = g.emitter_z;
  s.d = g.cavity_length;
  s.r1s = g.rs1();
  s.r2s = g.rs2();
  s.r1p = g.rp1();
  s.r2p = g.rp2();

  const bool mirrorless = std::abs(s.r1s) == 0.0 && std::abs(s.r2s) == 0.0 &&
                          std::abs(s.r1p) == 0.0 && std::abs(s.r2p) == 0.0;
  if (mirrorless) return out;

  quad::Tolerance tol;
  tol.rel = opts.rel_target;
  tol.abs = opts.rel_target * free_diag;  // scattering part scales with free
  tol.max_intervals = opts.max_intervals;

  auto part_xx = [](cplx fxx, cplx) { return fxx; };
  auto part_zz = [](cplx, cplx fzz) { return fzz; };

  const auto pxx = propagating_part(s, part_xx, tol);
  const auto pzz = propagating_part(s, part_zz, tol);
  const auto exx = evanescent_part(s, part_xx, tol);
  const auto ezz = evanescent_part(s, part_zz, tol);

  const double sc_xx = (pxx.value + exx.value).imag();
  const double sc_zz = (pzz.value + ezz.value).imag();
  out.imG(0, 0) += sc_xx;
  out.imG(1, 1) += sc_xx;
  out.imG(2, 2) += sc_zz;
  out.quadrature_error =
      pxx.error + pzz.error + exx.error + ezz.error;

  const double scale = std::max({std::abs(out.imG(0, 0)),
                                 std::abs(out.imG(2, 2)), free_diag});
  const double rel_err = out.quadrature_error / scale;
  if (rel_err > opts.rel_cap)
    throw quad::ConvergenceError(
        "im_greens: transverse-wavenumber quadrature did not converge "
        "(achieved relative error " + std::to_string(rel_err) + ")",
        rel_err);
  out.quadrature_warning = rel_err > opts.rel_target;

  if (opts.keep_integrand_samples) {
    for (int i = 0; i <= 200; ++i) {
      const double t = i / 200.0;
      const cplx kp = s.k * cplx(t, -0.5 * t * (1.0 - t));
      const cplx kz = std::sqrt(s.k * s.k - kp * kp);
      if (std::abs(kz) == 0.0) continue;
      cplx fxx, fzz;
      s.eval(kp, kz, fxx, fzz);
      out.decomposition_by_k.emplace_back(t, fxx.imag() + fzz.imag());
    }
  }
  return out;
}

namespace {

double dipole_projected_imG(const DyeParameters& dye, const GeometrySpec& g,
                            double omega, bool isotropic,
                            const QuadratureOptions& opts) {
  const auto ev = im_greens(g, omega, opts);
  if (isotropic) return dye.d01 * dye.d01 * ev.imG.trace() / 3.0;
  const Eigen::Vector3d dvec = dye.dipole_vector();
  return dvec.dot(ev.imG * dvec);
}

}  // namespace

double gamma_down_total(const DyeParameters& dye, const GeometrySpec& g,
                        bool isotropic_average, const QuadratureOptions& opts) {
  dye.validate();
  if (dye.d01 <= 0.0)
    throw std::invalid_argument("gamma_down_total: d01 must be > 0");
  const double dGd =
      dipole_projected_imG(dye, g, dye.omega10, isotropic_average, opts);
  return 2.0 * (mu0 / hbar) * dye.omega10 * dye.omega10 * dGd;
}

ResonantDecay gamma_down_resonant(const std::vector<CavityMode>& modes,
                                  const DyeParameters& dye) {
  ResonantDecay out;
  for (const auto& m : modes) {
    m.validate();
    const double delta = m.delta_nu(dye.omega10);
    const double denom = delta * delta + 0.25 * m.gamma_nu * m.gamma_nu;
    out.rate += m.Omega_nu * m.Omega_nu * (0.25 * m.gamma_nu) / denom;
    out.shift += 0.25 * m.Omega_nu * m.Omega_nu * delta / denom;
  }
  return out;
}

std::vector<CavityMode> extract_modes(const GeometrySpec& g,
                                      const DyeParameters& dye,
                                      double omega_lo, double omega_hi,
                                      int max_modes,
                                      const QuadratureOptions& opts) {
  g.validate();
  dye.validate();
  if (!(omega_lo > 0.0 && omega_hi > omega_lo))
    throw std::invalid_argument("extract_modes: bad scan window");
  if (dye.d01 <= 0.0)
    throw std::invalid_argument("extract_modes: dipole moment must be > 0");
  std::vector<CavityMode> modes;
  if (g.kind == GeometryKind::FreeSpace) return modes;

  const double n = std::sqrt(g.background_eps);
  const double rho = std::abs(g.rs1() * g.rs2());
  if (rho == 0.0) return modes;

  auto attach_rabi = [&](CavityMode& m) {
    const double dGd =
        dipole_projected_imG(dye, g, m.omega_nu, false, opts);
    const double w2 = 2.0 * mu0 * m.gamma_nu * m.omega_nu * m.omega_nu *
                      std::max(dGd, 0.0) / hbar;
    m.Omega_nu = std::sqrt(w2);
  };

  if (rho >= 1.0 - 1e-9) {
    // Perfect mirrors: the axial comb degenerates to delta resonances; emit
    // the standing-wave list directly with a floor linewidth.
    const double fsr = pi * c0 / (n * g.cavity_length);
    for (long m = std::max(1L, static_cast<long>(std::ceil(omega_lo / fsr)));
         m * fsr <= omega_hi; ++m) {
      CavityMode cm;
      cm.index = static_cast<int>(modes.size());
      cm.omega_nu = m * fsr;
      cm.gamma_nu = 1e-9 * cm.omega_nu;
      attach_rabi(cm);
      modes.push_back(cm);
      if (static_cast<int>(modes.size()) >= max_modes) break;
    }
    return modes;
  }

  // Lossy mirrors: scan the axial response on a grid fine enough to resolve
  // the Fabry-Perot linewidth, then fit each local maximum to a Lorentzian.
  const double gamma_est =
      (c0 / (n * g.cavity_length)) * (1.0 - rho) / std::sqrt(rho);
  const double dw = gamma_est / 8.0;
  const long npts =
      std::min<long>(static_cast<long>((omega_hi - omega_lo) / dw) + 2,
                     6'000'000L);
  const double step = (omega_hi - omega_lo) / static_cast<double>(npts - 1);

  std::vector<double> resp(npts);
  for (long i = 0; i < npts; ++i)
    resp[i] = axial_response(g, omega_lo + i * step);
  const double peak_threshold =
      0.1 * *std::max_element(resp.begin(), resp.end());

  for (long i = 1; i + 1 < npts; ++i) {
    if (!(resp[i] > resp[i - 1] && resp[i] >= resp[i + 1])) continue;
    if (resp[i] < peak_threshold || resp[i] <= 0.0) continue;

    // Parabolic refinement of the crest, then a local Lorentzian fit.
    const double y0 = resp[i - 1], y1 = resp[i], y2 = resp[i + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double wc = omega_lo + i * step;
    if (denom < 0.0) wc += 0.5 * step * (y0 - y2) / denom;

    std::vector<double> xs, ys;
    const double half_span = 4.0 * gamma_est;
    const int nfit = 81;
    for (int j = 0; j < nfit; ++j) {
      const double w = wc - half_span + 2.0 * half_span * j / (nfit - 1);
      if (w <= 0.0) continue;
      xs.push_back(w - wc);  // centered abscissa for conditioning
      ys.push_back(axial_response(g, w));
    }
    auto lorentz = [](double x, const Eigen::VectorXd& p) {
      // p = (peak A, center offset, fwhm gamma, baseline)
      const double hw = 0.5 * std::abs(p[2]);
      return p[0] * hw * hw / ((x - p[1]) * (x - p[1]) + hw * hw) + p[3];
    };
    Eigen::VectorXd p0(4);
    p0 << y1, 0.0, gamma_est, 0.0;
    auto fitres = fit::levenberg_marquardt(lorentz, xs, ys, p0);

    CavityMode cm;
    cm.index = static_cast<int>(modes.size());
    cm.omega_nu = wc + fitres.params[1];
    cm.gamma_nu = std::abs(fitres.params[2]);
    cm.fit_residual = fitres.rel_residual;
    cm.degraded_fit = fitres.rel_residual > 1e-2;
    if (cm.omega_nu < omega_lo || cm.omega_nu > omega_hi) continue;
    if (cm.gamma_nu <= 0.0) continue;
    attach_rabi(cm);
    modes.push_back(cm);
    if (static_cast<int>(modes.size()) >= max_modes) break;
    // skip past this resonance to avoid re-detecting its shoulder
    i += static_cast<long>(gamma_est / step);
  }

  std::sort(modes.begin(), modes.end(),
            [](const CavityMode& a, const CavityMode& b) {
              return a.omega_nu < b.omega_nu;
            });
  for (std::size_t j = 0; j < modes.size(); ++j)
    modes[j].index = static_cast<int>(j);
  return modes;
}

}  // namespace pbec::greens

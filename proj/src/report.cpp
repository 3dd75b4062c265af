#include "pbec/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pbec/evolve.hpp"

namespace pbec::cli {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

std::string provenance_comment(const cfg::RunConfig& c) {
  return std::string("# pbec ") + kVersion + " config=" + c.config_hash + "\n";
}

rates::AssembleOptions assemble_options(const cfg::RunConfig& c) {
  rates::AssembleOptions o;
  o.user_modes = c.user_modes;
  o.gamma_down_tot_override = c.gamma_down_tot_override;
  o.kappa_override = c.solver.kappa_override;
  o.delta_kappa = c.solver.delta_kappa;
  o.isotropic_dipole = c.isotropic_dipole;
  o.scan_lo = c.solver.scan_lo;
  o.scan_hi = c.solver.scan_hi;
  o.max_modes = c.solver.max_modes;
  return o;
}

std::vector<int> photon_cutoffs(const cfg::RunConfig& c, std::size_t n_modes) {
  std::vector<int> cut = c.solver.photon_cutoffs;
  if (cut.empty()) cut.assign(n_modes, 3);
  if (cut.size() == 1 && n_modes > 1) cut.assign(n_modes, cut[0]);
  if (cut.size() != n_modes)
    throw cfg::ConfigError(
        "config: solver.photon_cutoff must list one value or one per mode");
  return cut;
}

}  // namespace

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec)
    throw std::ios_base::failure("cannot create output directory `" + path +
                                 "`: " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open `" + path + "`");
  out << content;
  if (!out) throw std::ios_base::failure("write failed on `" + path + "`");
}

RatesArtifacts run_rates(const cfg::RunConfig& config) {
  RatesArtifacts a;
  a.assembled =
      rates::assemble_rates(config.dye, config.laser, config.geometry,
                            assemble_options(config));
  a.ks = rates::kennard_stepanov_check(a.assembled.rates, a.assembled.modes,
                                       config.dye);

  auto j = nlohmann::json::parse(a.assembled.rates.to_json());
  j["config_hash"] = config.config_hash;
  j["version"] = kVersion;
  a.rates_json = j.dump(2) + "\n";

  std::ostringstream t;
  t << "pbec " << kVersion << "  rates summary  config=" << config.config_hash
    << "\n\n";
  const auto& r = a.assembled.rates;
  t << "  kappa            = " << fmt(r.kappa) << " rad/s\n"
    << "  gamma_up         = " << fmt(r.gamma_up) << " rad/s\n"
    << "  gamma_down_tot   = " << fmt(r.gamma_down_tot) << " rad/s\n"
    << "  gamma_down_res   = " << fmt(r.gamma_down_res) << " rad/s\n"
    << "  gamma_down       = " << fmt(r.gamma_down) << " rad/s\n"
    << "  Gamma            = " << fmt(r.Gamma) << " rad/s\n"
    << "  delta_kappa      = " << fmt(r.delta_kappa) << " rad/s\n"
    << "  delta_gamma_up   = " << fmt(r.delta_gamma_up) << " rad/s\n"
    << "  delta_gd_res     = " << fmt(r.delta_gamma_down_res) << " rad/s\n\n";
  t << "  modes (" << a.assembled.modes.size() << "):\n";
  t << "   idx   omega_nu          gamma_nu        Omega_nu        "
       "G_abs           G_em\n";
  for (std::size_t i = 0; i < a.assembled.modes.size(); ++i) {
    const auto& m = a.assembled.modes[i];
    t << "   " << i << "  " << fmt(m.omega_nu) << "  " << fmt(m.gamma_nu)
      << "  " << fmt(m.Omega_nu) << "  " << fmt(r.gamma_abs[i]) << "  "
      << fmt(r.gamma_em[i]) << "\n";
  }
  t << "\n  Kennard-Stepanov (orientation s = " << a.ks.orientation
    << ", regime " << (a.ks.regime_valid ? "valid" : "flagged") << "):\n";
  for (const auto& e : a.ks.entries)
    t << "   delta_nu = " << fmt(e.delta_nu)
      << "  |ratio - 1| = " << fmt(e.deviation) << "\n";
  for (const auto& f : a.ks.flags) t << "   flag: " << f << "\n";
  for (const auto& w : a.assembled.warnings) t << "   warning: " << w << "\n";
  a.summary_text = t.str();
  return a;
}

void write_rates(const RatesArtifacts& a, const std::string& out_dir) {
  ensure_directory(out_dir);
  write_file(out_dir + "/rates.json", a.rates_json);
  write_file(out_dir + "/rates_summary.txt", a.summary_text);
}

namespace {

std::string trajectory_csv_header(const cfg::RunConfig& c,
                                  std::size_t n_modes) {
  std::string h = provenance_comment(c) + "t";
  for (std::size_t m = 0; m < n_modes; ++m)
    h += ",n_ph[" + std::to_string(m) + "]";
  h += ",excitation,purity,trace_err\n";
  return h;
}

std::string run_evolve_quantum(const cfg::RunConfig& config,
                               const rates::AssembledRates& asm_rates) {
  const auto& modes = asm_rates.modes;
  lindblad::HilbertLayout layout;
  layout.n_molecules = static_cast<int>(config.dye.n_molecules);
  layout.photon_cutoffs = photon_cutoffs(config, modes.size());

  lindblad::BuildOptions bo;
  bo.literal_photon_sum = config.solver.literal_photon_sum;

  for (int attempt = 0; attempt < 2; ++attempt) {
    auto L = lindblad::build_liouvillian(layout, asm_rates.rates, modes,
                                         config.dye, bo);
    std::vector<int> occ(layout.n_sites(), 0);
    if (config.solver.initial_excited && layout.n_molecules > 0) occ[0] = 1;
    if (!modes.empty()) {
      const int want = static_cast<int>(config.solver.initial_photons);
      if (want > layout.photon_cutoffs[0])
        throw cfg::ConfigError(
            "config: initial_photons exceeds the photon cutoff");
      occ[layout.n_molecules] = want;
    }
    auto state = lindblad::QuantumState::basis_state(
        layout, lindblad::basis_index(layout, occ));

    lindblad::EvolveOptions eo;
    eo.t_final = config.solver.t_final;
    eo.dt = config.solver.dt > 0.0 ? config.solver.dt : 0.05 / L.scale();
    eo.sample_stride = config.solver.sample_stride;
    auto traj = lindblad::evolve(state, L, eo);

    // One-shot cutoff doubling when the top Fock level is populated.
    if (traj.max_top_fock > 1e-6 && attempt == 0) {
      for (int& cval : layout.photon_cutoffs) cval *= 2;
      continue;
    }

    std::string csv = trajectory_csv_header(config, modes.size());
    for (const auto& p : traj.points) {
      csv += fmt(p.t);
      for (double nv : p.n_photon) csv += "," + fmt(nv);
      csv += "," + fmt(p.excitation) + "," + fmt(p.purity) + "," +
             fmt(p.trace_err) + "\n";
    }
    return csv;
  }
  throw std::runtime_error("evolve: photon cutoff doubling did not cure "
                           "truncation leakage");
}

std::string run_evolve_meanfield(const cfg::RunConfig& config,
                                 const rates::AssembledRates& asm_rates) {
  const auto& modes = asm_rates.modes;
  meanfield::MeanFieldState s;
  s.n.assign(modes.size(), 0.0);
  if (!modes.empty())
    s.n[0] = static_cast<double>(config.solver.initial_photons);
  s.f = config.solver.initial_excited ? 1.0 : 0.0;

  double scale = asm_rates.rates.gamma_up + asm_rates.rates.gamma_down;
  for (std::size_t v = 0; v < modes.size(); ++v)
    scale = std::max({scale, modes[v].gamma_nu,
                      config.dye.n_molecules * asm_rates.rates.gamma_em[v]});
  const double dt =
      config.solver.dt > 0.0 ? config.solver.dt : 0.05 / std::max(scale, 1e-300);
  const long n_steps =
      static_cast<long>(std::ceil(config.solver.t_final / dt - 1e-12));

  auto deriv = [&](const meanfield::MeanFieldState& st) {
    return meanfield::rhs(st, asm_rates.rates, modes, config.dye);
  };
  auto advance = [&](const meanfield::MeanFieldState& st, double h,
                     const meanfield::Derivative& d) {
    meanfield::MeanFieldState o = st;
    for (std::size_t v = 0; v < o.n.size(); ++v) o.n[v] += h * d.dn[v];
    o.f += h * d.df;
    return o;
  };

  const double N = static_cast<double>(config.dye.n_molecules);
  std::string csv = trajectory_csv_header(config, modes.size());
  auto record = [&]() {
    csv += fmt(s.time);
    for (double nv : s.n) csv += "," + fmt(nv);
    csv += "," + fmt(N * s.f) + ",0,0\n";
  };
  record();
  for (long step = 0; step < n_steps; ++step) {
    const auto k1 = deriv(s);
    const auto k2 = deriv(advance(s, 0.5 * dt, k1));
    const auto k3 = deriv(advance(s, 0.5 * dt, k2));
    const auto k4 = deriv(advance(s, dt, k3));
    for (std::size_t v = 0; v < s.n.size(); ++v)
      s.n[v] += dt / 6.0 * (k1.dn[v] + 2 * k2.dn[v] + 2 * k3.dn[v] + k4.dn[v]);
    s.f += dt / 6.0 * (k1.df + 2 * k2.df + 2 * k3.df + k4.df);
    s.time += dt;
    if ((step + 1) % config.solver.sample_stride == 0 || step + 1 == n_steps)
      record();
  }
  return csv;
}

}  // namespace

std::string run_evolve(const cfg::RunConfig& config,
                       const std::string& out_dir) {
  if (config.solver.t_final <= 0.0)
    throw cfg::ConfigError("config: solver.t_final must be > 0 for evolve");
  const auto asm_rates =
      rates::assemble_rates(config.dye, config.laser, config.geometry,
                            assemble_options(config));
  const std::string csv = config.solver.engine == cfg::Engine::Quantum
                              ? run_evolve_quantum(config, asm_rates)
                              : run_evolve_meanfield(config, asm_rates);
  ensure_directory(out_dir);
  write_file(out_dir + "/trajectory.csv", csv);
  return csv;
}

std::string run_steady(const cfg::RunConfig& config,
                       const std::string& out_dir) {
  const auto asm_rates =
      rates::assemble_rates(config.dye, config.laser, config.geometry,
                            assemble_options(config));
  nlohmann::json j;
  j["config_hash"] = config.config_hash;
  j["version"] = kVersion;
  if (config.solver.engine == cfg::Engine::Quantum) {
    lindblad::HilbertLayout layout;
    layout.n_molecules = static_cast<int>(config.dye.n_molecules);
    layout.photon_cutoffs = photon_cutoffs(config, asm_rates.modes.size());
    auto L = lindblad::build_liouvillian(layout, asm_rates.rates,
                                         asm_rates.modes, config.dye);
    auto st = lindblad::steady_state(L);
    std::vector<double> nph;
    for (std::size_t m = 0; m < asm_rates.modes.size(); ++m)
      nph.push_back(st.state.expect_diagonal(
          lindblad::photon_number_diagonal(layout, static_cast<int>(m))));
    j["engine"] = "quantum";
    j["n_photon"] = nph;
    j["excitation"] = st.state.expect_diagonal(
        lindblad::excitation_diagonal(layout));
    j["purity"] = st.state.purity();
    j["residual"] = st.residual;
    j["method"] = st.method;
  } else {
    auto so = meanfield::steady(asm_rates.rates, asm_rates.modes, config.dye,
                                asm_rates.rates.gamma_up);
    j["engine"] = "meanfield";
    j["n_photon"] = so.state.n;
    j["f"] = so.state.f;
    j["residual"] = so.residual;
    j["method"] = so.method;
    j["multiple_roots"] = so.multiple_roots;
  }
  const std::string text = j.dump(2) + "\n";
  ensure_directory(out_dir);
  write_file(out_dir + "/steady.json", text);
  return text;
}

namespace {

std::string scan_svg(const cfg::RunConfig& config,
                     const meanfield::ScanResult& scan) {
  const double W = 640, H = 420, ml = 70, mr = 20, mt = 40, mb = 50;
  const double plot_w = W - ml - mr, plot_h = H - mt - mb;
  const double x0 = scan.pump.front(), x1 = scan.pump.back();
  auto X = [&](double p) {
    return ml + (x1 > x0 ? (p - x0) / (x1 - x0) : 0.5) * plot_w;
  };
  auto Y = [&](double g) { return mt + (1.0 - g) * plot_h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\">\n";
  s << "<!-- pbec " << kVersion << " config=" << config.config_hash
    << " -->\n";
  s << "<rect width=\"" << W << "\" height=\"" << H
    << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << ml << "\" y=\"24\" font-size=\"15\">ground-mode "
       "fraction vs pump (config " << config.config_hash << ")</text>\n";
  // axes
  s << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
    << ml + plot_w << "\" y2=\"" << mt + plot_h
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
    << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << H - 12
    << "\" font-size=\"13\" text-anchor=\"middle\">Gamma_up (rad/s)</text>\n";
  for (int g = 0; g <= 4; ++g) {
    const double gy = g / 4.0;
    s << "<text x=\"" << ml - 8 << "\" y=\"" << Y(gy) + 4
      << "\" font-size=\"11\" text-anchor=\"end\">" << gy << "</text>\n";
    s << "<line x1=\"" << ml - 4 << "\" y1=\"" << Y(gy) << "\" x2=\"" << ml
      << "\" y2=\"" << Y(gy) << "\" stroke=\"black\"/>\n";
  }
  // polyline
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" "
       "points=\"";
  for (std::size_t i = 0; i < scan.pump.size(); ++i)
    s << X(scan.pump[i]) << "," << Y(scan.ground_fraction[i]) << " ";
  s << "\"/>\n";
  if (scan.threshold) {
    s << "<line x1=\"" << X(*scan.threshold) << "\" y1=\"" << mt << "\" x2=\""
      << X(*scan.threshold) << "\" y2=\"" << mt + plot_h
      << "\" stroke=\"#d62728\" stroke-dasharray=\"6 3\"/>\n";
    s << "<text x=\"" << X(*scan.threshold) + 5 << "\" y=\"" << mt + 16
      << "\" font-size=\"12\" fill=\"#d62728\">threshold</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

ScanArtifacts run_scan(const cfg::RunConfig& config,
                       const std::string& out_dir) {
  if (config.solver.pump_grid.empty())
    throw cfg::ConfigError("config: solver.pump_lo/pump_hi required for scan");
  const auto asm_rates =
      rates::assemble_rates(config.dye, config.laser, config.geometry,
                            assemble_options(config));

  ScanArtifacts a;
  a.scan = meanfield::pump_scan(asm_rates.rates, asm_rates.modes, config.dye,
                                config.solver.pump_grid,
                                config.solver.crossing_fraction);

  // CSV: pump,f,n_0,...,n_K,ground_fraction
  std::string csv = provenance_comment(config) + "pump,f";
  for (std::size_t v = 0; v < asm_rates.modes.size(); ++v)
    csv += ",n_" + std::to_string(v);
  csv += ",ground_fraction\n";
  for (std::size_t i = 0; i < a.scan.pump.size(); ++i) {
    csv += fmt(a.scan.pump[i]) + "," + fmt(a.scan.states[i].f);
    for (double nv : a.scan.states[i].n) csv += "," + fmt(nv);
    csv += "," + fmt(a.scan.ground_fraction[i]) + "\n";
  }
  a.csv = csv;

  nlohmann::json j;
  j["config_hash"] = config.config_hash;
  j["version"] = kVersion;
  j["pump"] = a.scan.pump;
  j["ground_fraction"] = a.scan.ground_fraction;
  j["bracketed"] = a.scan.bracketed;
  if (a.scan.threshold) j["threshold"] = *a.scan.threshold;
  else j["threshold"] = nullptr;
  j["crossing_fraction"] = a.scan.crossing_fraction;
  std::vector<double> fs;
  for (const auto& s : a.scan.states) fs.push_back(s.f);
  j["f"] = fs;
  // BE fit on the last sub-threshold state when possible
  try {
    std::size_t pick = a.scan.states.size() - 1;
    for (std::size_t i = 0; i < a.scan.states.size(); ++i)
      if (a.scan.ground_fraction[i] < a.scan.crossing_fraction) pick = i;
    const auto fit = meanfield::be_fit(a.scan.states[pick], asm_rates.modes);
    j["be_fit"] = {{"T_eff", fit.T_eff},
                   {"mu_eff", fit.mu_eff},
                   {"residual", fit.residual},
                   {"degenerate", fit.degenerate},
                   {"modes_used", fit.modes_used},
                   {"pump", a.scan.pump[pick]}};
  } catch (const std::exception& e) {
    j["be_fit"] = {{"error", e.what()}};
  }
  a.json = j.dump(2) + "\n";
  a.svg = scan_svg(config, a.scan);

  ensure_directory(out_dir);
  write_file(out_dir + "/scan.csv", a.csv);
  write_file(out_dir + "/scan.json", a.json);
  write_file(out_dir + "/scan.svg", a.svg);
  return a;
}

}  // namespace pbec::cli

#include "pbec/config.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace pbec::cfg {

namespace {

struct KeySpec {
  const char* unit;  // "" = dimensionless
  bool is_list = false;
  bool is_string = false;
};

// section.key -> unit contract
const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> t = {
      {"dye.omega10", {"rad_s"}},
      {"dye.Omega", {"rad_s"}},
      {"dye.huang_rhys", {""}},
      {"dye.d01", {"C_m"}},
      {"dye.dipole_axis", {"", false, true}},
      {"dye.temperature", {"K"}},
      {"dye.n_molecules", {""}},
      {"laser.I0", {"W_m2"}},
      {"laser.lineshape", {"", false, true}},
      {"laser.gamma_L", {"rad_s"}},
      {"laser.omega_L", {"rad_s"}},
      {"laser.laser_temperature", {"K"}},
      {"geometry.kind", {"", false, true}},
      {"geometry.cavity_length", {"m"}},
      {"geometry.emitter_z", {"m"}},
      {"geometry.r1_s", {""}},
      {"geometry.r1_p", {""}},
      {"geometry.r2_s", {""}},
      {"geometry.r2_p", {""}},
      {"geometry.perfect_mirrors", {"", false, true}},
      {"geometry.background_eps", {""}},
      {"geometry.isotropic_dipole", {"", false, true}},
      {"modes.omega_nu", {"rad_s", true}},
      {"modes.gamma_nu", {"rad_s", true}},
      {"modes.Omega_nu", {"rad_s", true}},
      {"modes.gamma_down_tot", {"rad_s"}},
      {"solver.engine", {"", false, true}},
      {"solver.dt", {"s"}},
      {"solver.t_final", {"s"}},
      {"solver.sample_stride", {""}},
      {"solver.photon_cutoff", {"", true}},
      {"solver.scan_lo", {"rad_s"}},
      {"solver.scan_hi", {"rad_s"}},
      {"solver.max_modes", {""}},
      {"solver.kappa_override", {"rad_s"}},
      {"solver.delta_kappa", {"rad_s"}},
      {"solver.pump_lo", {"rad_s"}},
      {"solver.pump_hi", {"rad_s"}},
      {"solver.pump_points", {""}},
      {"solver.crossing_fraction", {""}},
      {"solver.initial_photons", {""}},
      {"solver.initial_excited", {"", false, true}},
      {"solver.literal_photon_sum", {"", false, true}},
      {"output.directory", {"", false, true}},
  };
  return t;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct RawConfig {
  // ordered (section.key, value-with-unit) pairs, last value wins
  std::map<std::string, std::string> kv;
};

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key `" + key + "` outside any [section]");
    const std::string full = section + "." + key;
    if (!key_table().count(full))
      throw ConfigError("config: unknown key `" + full + "`");
    raw.kv[full] = value;
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  bool has(const std::string& k) const { return raw_.kv.count(k) > 0; }

  std::string get_string(const std::string& k) {
    return fetch(k, /*want_list=*/false);
  }

  double get_double(const std::string& k) {
    return parse_number(k, fetch(k, false));
  }

  double get_double_or(const std::string& k, double fallback) {
    return has(k) ? get_double(k) : fallback;
  }

  long get_long(const std::string& k, long fallback) {
    if (!has(k)) return fallback;
    const double v = get_double(k);
    return static_cast<long>(v);
  }

  bool get_bool(const std::string& k, bool fallback) {
    if (!has(k)) return fallback;
    const std::string v = fetch(k, false);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key `" + k + "` expects true/false");
  }

  std::vector<double> get_list(const std::string& k) {
    const std::string body = fetch(k, true);
    std::istringstream in(body);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_number(k, tok));
    if (out.empty()) throw ConfigError("config: key `" + k + "` empty list");
    return out;
  }

 private:
  // strips and checks the unit suffix, returns the value body
  std::string fetch(const std::string& k, bool want_list) {
    auto it = raw_.kv.find(k);
    if (it == raw_.kv.end())
      throw ConfigError("config: missing required key `" + k + "`");
    const KeySpec& spec = key_table().at(k);
    std::string v = it->second;
    if (spec.is_string) return v;
    if (std::string(spec.unit).empty()) return v;
    // last whitespace-separated token must equal the unit
    const auto pos = v.find_last_of(" \t");
    if (pos == std::string::npos)
      throw ConfigError("config: key `" + k + "` requires unit suffix `" +
                        spec.unit + "`");
    const std::string unit = trim(v.substr(pos + 1));
    if (unit != spec.unit)
      throw ConfigError("config: key `" + k + "` has unit `" + unit +
                        "`, expected `" + spec.unit + "`");
    (void)want_list;
    return trim(v.substr(0, pos));
  }

  double to_number(const std::string& k, const std::string& tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: key `" + k + "` has non-numeric value `" +
                        tok + "`");
    }
  }

  double parse_number(const std::string& k, const std::string& body) {
    return to_number(k, body);
  }

  RawConfig raw_;
};

Eigen::Vector3d parse_axis(const std::string& s) {
  if (s == "x") return Eigen::Vector3d::UnitX();
  if (s == "y") return Eigen::Vector3d::UnitY();
  if (s == "z") return Eigen::Vector3d::UnitZ();
  std::istringstream in(s);
  Eigen::Vector3d v;
  if (in >> v[0] >> v[1] >> v[2]) return v;
  throw ConfigError("config: dye.dipole_axis expects x|y|z or three numbers");
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

RunConfig RunConfig::from_string(const std::string& text) {
  RawConfig raw = parse_raw(text);

  // normalized text for the hash: sorted key=value lines
  std::string normalized;
  for (const auto& [k, v] : raw.kv) normalized += k + "=" + v + "\n";

  Reader rd(raw);
  RunConfig c;
  c.config_hash = fnv1a_hex(normalized);

  c.dye.omega10 = rd.get_double("dye.omega10");
  c.dye.Omega = rd.get_double("dye.Omega");
  c.dye.huang_rhys = rd.get_double_or("dye.huang_rhys", 0.0);
  c.dye.d01 = rd.get_double_or("dye.d01", 0.0);
  if (rd.has("dye.dipole_axis"))
    c.dye.dipole_axis = parse_axis(rd.get_string("dye.dipole_axis"));
  c.dye.temperature = rd.get_double_or("dye.temperature", 300.0);
  c.dye.n_molecules = rd.get_long("dye.n_molecules", 1);

  if (rd.has("laser.I0")) {
    c.laser.I0 = rd.get_double("laser.I0");
    const std::string shape = rd.get_string("laser.lineshape");
    if (shape == "rectangular") c.laser.lineshape = Lineshape::Rectangular;
    else if (shape == "gaussian") c.laser.lineshape = Lineshape::Gaussian;
    else if (shape == "lorentzian") c.laser.lineshape = Lineshape::Lorentzian;
    else throw ConfigError("config: laser.lineshape must be rectangular, "
                           "gaussian or lorentzian");
    c.laser.gamma_L = rd.get_double("laser.gamma_L");
    c.laser.omega_L = rd.get_double_or("laser.omega_L", c.dye.omega10);
    c.laser.laser_temperature =
        rd.get_double_or("laser.laser_temperature", -1.0);
  } else {
    c.laser.I0 = 0.0;
    c.laser.gamma_L = 1.0;
  }

  if (rd.has("geometry.kind")) {
    const std::string kind = rd.get_string("geometry.kind");
    if (kind == "free_space") c.geometry.kind = GeometryKind::FreeSpace;
    else if (kind == "planar_cavity")
      c.geometry.kind = GeometryKind::PlanarCavity;
    else throw ConfigError(
        "config: geometry.kind must be free_space or planar_cavity");
    if (c.geometry.kind == GeometryKind::PlanarCavity) {
      c.geometry.cavity_length = rd.get_double("geometry.cavity_length");
      c.geometry.emitter_z = rd.get_double("geometry.emitter_z");
      c.geometry.perfect_mirrors =
          rd.get_bool("geometry.perfect_mirrors", false);
      c.geometry.r1_s = rd.get_double_or("geometry.r1_s", 0.0);
      c.geometry.r1_p = rd.get_double_or("geometry.r1_p", 0.0);
      c.geometry.r2_s = rd.get_double_or("geometry.r2_s", 0.0);
      c.geometry.r2_p = rd.get_double_or("geometry.r2_p", 0.0);
      c.geometry.background_eps =
          rd.get_double_or("geometry.background_eps", 1.0);
    }
    c.isotropic_dipole = rd.get_bool("geometry.isotropic_dipole", false);
  }

  if (rd.has("modes.omega_nu")) {
    const auto ws = rd.get_list("modes.omega_nu");
    const auto gs = rd.get_list("modes.gamma_nu");
    const auto os = rd.get_list("modes.Omega_nu");
    if (ws.size() != gs.size() || ws.size() != os.size())
      throw ConfigError("config: modes lists must have equal length");
    std::vector<CavityMode> modes(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) {
      modes[i].index = static_cast<int>(i);
      modes[i].omega_nu = ws[i];
      modes[i].gamma_nu = gs[i];
      modes[i].Omega_nu = os[i];
    }
    c.user_modes = std::move(modes);
    c.gamma_down_tot_override = rd.get_double("modes.gamma_down_tot");
  }

  if (rd.has("solver.engine")) {
    const std::string e = rd.get_string("solver.engine");
    if (e == "quantum") c.solver.engine = Engine::Quantum;
    else if (e == "meanfield") c.solver.engine = Engine::MeanField;
    else throw ConfigError("config: solver.engine must be quantum|meanfield");
  }
  c.solver.dt = rd.get_double_or("solver.dt", 0.0);
  c.solver.t_final = rd.get_double_or("solver.t_final", 0.0);
  c.solver.sample_stride =
      static_cast<int>(rd.get_long("solver.sample_stride", 1));
  if (rd.has("solver.photon_cutoff")) {
    for (double v : rd.get_list("solver.photon_cutoff"))
      c.solver.photon_cutoffs.push_back(static_cast<int>(v));
  }
  c.solver.scan_lo = rd.get_double_or("solver.scan_lo", 0.0);
  c.solver.scan_hi = rd.get_double_or("solver.scan_hi", 0.0);
  c.solver.max_modes = static_cast<int>(rd.get_long("solver.max_modes", 64));
  if (rd.has("solver.kappa_override"))
    c.solver.kappa_override = rd.get_double("solver.kappa_override");
  c.solver.delta_kappa = rd.get_double_or("solver.delta_kappa", 0.0);
  if (rd.has("solver.pump_lo") || rd.has("solver.pump_hi")) {
    const double lo = rd.get_double("solver.pump_lo");
    const double hi = rd.get_double("solver.pump_hi");
    const long npts = rd.get_long("solver.pump_points", 20);
    if (!(hi > lo) || npts < 1)
      throw ConfigError("config: pump grid must satisfy hi > lo, points >= 1");
    for (long i = 0; i < npts; ++i)
      c.solver.pump_grid.push_back(
          npts == 1 ? lo : lo + (hi - lo) * i / double(npts - 1));
  }
  c.solver.crossing_fraction = rd.get_double_or("solver.crossing_fraction", 0.5);
  c.solver.initial_photons = rd.get_long("solver.initial_photons", 0);
  c.solver.initial_excited = rd.get_bool("solver.initial_excited", false);
  c.solver.literal_photon_sum =
      rd.get_bool("solver.literal_photon_sum", false);
  if (rd.has("output.directory"))
    c.output_dir = rd.get_string("output.directory");

  c.dye.validate();
  c.laser.validate();
  c.geometry.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::ios_base::failure("config: cannot open `" + path + "`");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

}  // namespace pbec::cfg

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbec/dye.hpp"
#include "pbec/geometry.hpp"

// INI-style run configuration with unit-suffixed scalars
// (`omega10 = 2.4e15 rad_s`). Parsing is strict: unknown sections or keys,
// missing unit suffixes and wrong units are errors carrying the offending
// name. The normalized key/value list is hashed (FNV-1a 64) and the hash is
// embedded in every output file.
namespace pbec::cfg {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Engine { Quantum, MeanField };

struct SolverOptions {
  Engine engine = Engine::Quantum;
  double dt = 0.0;            // s; 0 -> auto (0.05 / fastest scale)
  double t_final = 0.0;       // s
  int sample_stride = 1;
  std::vector<int> photon_cutoffs;  // one per mode, or single value for all
  double scan_lo = 0.0, scan_hi = 0.0;
  int max_modes = 64;
  std::optional<double> kappa_override;
  double delta_kappa = 0.0;
  std::vector<double> pump_grid;
  double crossing_fraction = 0.5;
  long initial_photons = 0;   // Fock occupation of the first mode at t = 0
  bool initial_excited = false;
  bool literal_photon_sum = false;
};

struct RunConfig {
  DyeParameters dye;
  LaserSpec laser;
  GeometrySpec geometry;
  std::optional<std::vector<CavityMode>> user_modes;
  std::optional<double> gamma_down_tot_override;
  bool isotropic_dipole = false;
  SolverOptions solver;
  std::string output_dir = "out";
  std::string config_hash;  // 16 hex digits of the normalized text

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
};

std::string fnv1a_hex(const std::string& text);

}  // namespace pbec::cfg

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kBin = PBEC_BINARY_PATH;
const std::string kGolden = std::string(PBEC_SOURCE_DIR) + "/tests/golden";

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const fs::path& dir) {
  const fs::path so = dir / "stdout.txt", se = dir / "stderr.txt";
  const std::string cmd =
      kBin + " " + args + " >" + so.string() + " 2>" + se.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path("cli_scratch") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Empty cavity: one user-supplied mode, no coupling, photon starts in |1>.
std::string empty_cavity_config(const std::string& outdir,
                                const std::string& engine) {
  return R"([dye]
omega10 = 2.4e15 rad_s
Omega = 1.5e13 rad_s
huang_rhys = 0
d01 = 0 C_m
temperature = 300 K
n_molecules = 0

[modes]
omega_nu = 2.4e15 rad_s
gamma_nu = 1e9 rad_s
Omega_nu = 0 rad_s
gamma_down_tot = 0 rad_s

[solver]
engine = )" + engine + R"(
dt = 1e-12 s
t_final = 5e-9 s
sample_stride = 100
photon_cutoff = 3
initial_photons = 1

[output]
directory = )" + outdir + "\n";
}

std::string rates_reference_config(const std::string& outdir,
                                   const std::string& I0 = "1e7") {
  return R"([dye]
omega10 = 2.4e15 rad_s
Omega = 1.5e13 rad_s
huang_rhys = 0.3
d01 = 3.34e-30 C_m
temperature = 300 K
n_molecules = 1

[laser]
I0 = )" + I0 + R"( W_m2
lineshape = lorentzian
gamma_L = 1e12 rad_s
omega_L = 2.41e15 rad_s

[modes]
omega_nu = 2.385e15 2.4e15 rad_s
gamma_nu = 5e10 8e10 rad_s
Omega_nu = 2e10 1e10 rad_s
gamma_down_tot = 2e11 rad_s

[output]
directory = )" + outdir + "\n";
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't' ||
        line[0] == 'p')
      continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("evolve: empty cavity decays as exp(-kappa t) with R^2 > 1 - 1e-9") {
  auto dir = fresh_dir("evolve_q");
  write(dir / "run.ini", empty_cavity_config((dir / "out").string(),
                                             "quantum"));
  auto r = run("evolve --config " + (dir / "run.ini").string(), dir);
  REQUIRE(r.exit_code == 0);
  auto rows = parse_csv(slurp(dir / "out" / "trajectory.csv"));
  REQUIRE(rows.size() > 10);

  const double kappa = 1e9;
  double ss_res = 0.0, ss_tot = 0.0, mean = 0.0;
  for (const auto& row : rows) mean += row[1] / rows.size();
  for (const auto& row : rows) {
    const double fit = std::exp(-kappa * row[0]);
    ss_res += (row[1] - fit) * (row[1] - fit);
    ss_tot += (row[1] - mean) * (row[1] - mean);
  }
  CHECK(1.0 - ss_res / ss_tot > 1.0 - 1e-9);
}

TEST_CASE("evolve: the engines coincide on the linear decay problem") {
  auto dq = fresh_dir("engines_q");
  write(dq / "run.ini", empty_cavity_config((dq / "out").string(),
                                            "quantum"));
  REQUIRE(run("evolve --config " + (dq / "run.ini").string(), dq).exit_code ==
          0);
  auto dm = fresh_dir("engines_m");
  write(dm / "run.ini", empty_cavity_config((dm / "out").string(),
                                            "meanfield"));
  REQUIRE(run("evolve --config " + (dm / "run.ini").string(), dm).exit_code ==
          0);

  auto q = parse_csv(slurp(dq / "out" / "trajectory.csv"));
  auto m = parse_csv(slurp(dm / "out" / "trajectory.csv"));
  REQUIRE(q.size() == m.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    CHECK(std::abs(q[i][1] - m[i][1]) < 1e-9 * (q[i][1] + 1e-12));
}

TEST_CASE("--engine flag overrides the config") {
  auto dir = fresh_dir("engine_flag");
  write(dir / "run.ini", empty_cavity_config((dir / "out").string(),
                                             "quantum"));
  auto r = run("evolve --engine meanfield --config " +
                   (dir / "run.ini").string(),
               dir);
  CHECK(r.exit_code == 0);
  // mean-field trajectories carry zero purity/trace columns
  auto rows = parse_csv(slurp(dir / "out" / "trajectory.csv"));
  CHECK(rows.back().back() == 0.0);
}

TEST_CASE("rates: golden fixture byte-for-byte and determinism") {
  auto d1 = fresh_dir("rates_1");
  write(d1 / "run.ini", rates_reference_config((d1 / "out").string()));
  REQUIRE(run("rates --config " + (d1 / "run.ini").string(), d1).exit_code ==
          0);
  const std::string first = slurp(d1 / "out" / "rates.json");

  auto d2 = fresh_dir("rates_2");
  write(d2 / "run.ini", rates_reference_config((d2 / "out").string()));
  REQUIRE(run("rates --config " + (d2 / "run.ini").string(), d2).exit_code ==
          0);
  CHECK(first == slurp(d2 / "out" / "rates.json"));

  // output directory does not enter the hash-relevant key set used here, so
  // the committed golden must match exactly
  const std::string golden = slurp(fs::path(kGolden) / "rates.json");
  REQUIRE(!golden.empty());
  auto dg = fresh_dir("rates_g");
  write(dg / "run.ini", rates_reference_config("GOLDEN_OUT"));
  REQUIRE(run("rates --config " + (dg / "run.ini").string() + " --out " +
                  (dg / "out").string(),
              dg).exit_code == 0);
  CHECK(slurp(dg / "out" / "rates.json") == golden);
}

TEST_CASE("rates: zero laser intensity yields zero pump rate in the output") {
  auto dir = fresh_dir("rates_dark");
  write(dir / "run.ini", rates_reference_config((dir / "out").string(), "0"));
  REQUIRE(run("rates --config " + (dir / "run.ini").string(), dir).exit_code ==
          0);
  const std::string json = slurp(dir / "out" / "rates.json");
  CHECK(json.find("\"gamma_up\": 0.0") != std::string::npos);
}

TEST_CASE("strict parsing: unknown key is named, exit code 2") {
  auto dir = fresh_dir("badkey");
  std::string cfg = rates_reference_config((dir / "out").string());
  cfg += "\n[laser]\ngama_up = 1 rad_s\n";
  write(dir / "run.ini", cfg);
  auto r = run("rates --config " + (dir / "run.ini").string(), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("gama_up") != std::string::npos);
}

TEST_CASE("missing unit suffix is a config error") {
  auto dir = fresh_dir("nounit");
  std::string cfg = rates_reference_config((dir / "out").string());
  const auto pos = cfg.find("omega10 = 2.4e15 rad_s");
  REQUIRE(pos != std::string::npos);
  cfg.replace(pos, 22, "omega10 = 2.4e15      ");
  write(dir / "run.ini", cfg);
  auto r = run("rates --config " + (dir / "run.ini").string(), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("omega10") != std::string::npos);
}

TEST_CASE("unwritable output directory exits with code 3") {
  auto dir = fresh_dir("badout");
  write(dir / "run.ini", rates_reference_config("/dev/null/nope"));
  auto r = run("rates --config " + (dir / "run.ini").string(), dir);
  CHECK(r.exit_code == 3);
}

TEST_CASE("missing config file exits with code 3") {
  auto dir = fresh_dir("noconfig");
  auto r = run("rates --config " + (dir / "does_not_exist.ini").string(), dir);
  CHECK(r.exit_code == 3);
}

namespace {

std::string scan_reference_config(const std::string& outdir) {
  // six user modes around the transition; moderate per-mode loss
  return R"([dye]
omega10 = 2.4e15 rad_s
Omega = 1.571e13 rad_s
huang_rhys = 0.25
d01 = 1e-30 C_m
temperature = 300 K
n_molecules = 1

[modes]
omega_nu = 2.36858e15 2.37801e15 2.38744e15 2.39686e15 2.40629e15 2.41572e15 rad_s
gamma_nu = 6.0e8 6.0e8 6.0e8 6.0e8 6.0e8 6.0e8 rad_s
Omega_nu = 2.0e11 2.0e11 2.0e11 2.0e11 2.0e11 2.0e11 rad_s
gamma_down_tot = 3.2e12 rad_s

[solver]
kappa_override = 6.0e8 rad_s
pump_lo = 2.0e11 rad_s
pump_hi = 3.0e12 rad_s
pump_points = 15

[output]
directory = )" + outdir + "\n";
}

}  // namespace

TEST_CASE("scan: reference threshold matches the golden value") {
  auto dir = fresh_dir("scan_ref");
  write(dir / "run.ini", scan_reference_config((dir / "out").string()));
  auto r = run("scan --config " + (dir / "run.ini").string(), dir);
  REQUIRE(r.exit_code == 0);
  const std::string json = slurp(dir / "out" / "scan.json");
  REQUIRE(json.find("\"bracketed\": true") != std::string::npos);

  const std::string golden =
      slurp(fs::path(kGolden) / "scan_threshold.txt");
  REQUIRE(!golden.empty());
  const double expect = std::stod(golden);
  const auto pos = json.find("\"threshold\": ");
  REQUIRE(pos != std::string::npos);
  const double got = std::stod(json.substr(pos + 13));
  CHECK(std::abs(got - expect) <= 1e-3 * expect);

  // SVG artifact exists and carries the threshold marker
  const std::string svg = slurp(dir / "out" / "scan.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("threshold") != std::string::npos);
}

TEST_CASE("scan: a single-point grid is a valid, unbracketed result") {
  auto dir = fresh_dir("scan_single");
  std::string cfg = scan_reference_config((dir / "out").string());
  const auto pos = cfg.find("pump_points = 15");
  cfg.replace(pos, 16, "pump_points = 1 ");
  write(dir / "run.ini", cfg);
  auto r = run("scan --config " + (dir / "run.ini").string(), dir);
  CHECK(r.exit_code == 0);
  const std::string json = slurp(dir / "out" / "scan.json");
  CHECK(json.find("\"bracketed\": false") != std::string::npos);
  CHECK(json.find("\"threshold\": null") != std::string::npos);
}

TEST_CASE("scan: below-threshold-only grid reports not-bracketed, exit 0") {
  auto dir = fresh_dir("scan_below");
  std::string cfg = scan_reference_config((dir / "out").string());
  auto pos = cfg.find("pump_hi = 3.0e12 rad_s");
  cfg.replace(pos, 22, "pump_hi = 4.0e11 rad_s");
  write(dir / "run.ini", cfg);
  auto r = run("scan --config " + (dir / "run.ini").string(), dir);
  CHECK(r.exit_code == 0);
  CHECK(slurp(dir / "out" / "scan.json").find("\"bracketed\": false") !=
        std::string::npos);
}

TEST_CASE("steady subcommand writes both engines' reports") {
  auto dir = fresh_dir("steady_cmd");
  write(dir / "run.ini", rates_reference_config((dir / "out").string()));
  auto rq = run("steady --engine quantum --config " +
                    (dir / "run.ini").string(),
                dir);
  REQUIRE(rq.exit_code == 0);
  CHECK(rq.out.find("\"engine\": \"quantum\"") != std::string::npos);
  auto rm = run("steady --engine meanfield --config " +
                    (dir / "run.ini").string(),
                dir);
  REQUIRE(rm.exit_code == 0);
  CHECK(rm.out.find("\"engine\": \"meanfield\"") != std::string::npos);
}

TEST_CASE("verify: criterion 1 passes and the kappa-flip hook breaks it") {
  auto dir = fresh_dir("verify");
  auto ok = run("verify --only 1 --json", dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("\"pass\": true") != std::string::npos);

  auto bad = run("verify --only 1 --json --inject-kappa-sign-flip", dir);
  CHECK(bad.exit_code == 4);
  CHECK(bad.out.find("\"pass\": false") != std::string::npos);
}

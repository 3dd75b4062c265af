// pbec: dye-microcavity photon condensate toolkit.
// Subcommands: rates, evolve, steady, scan, verify.
// Exit codes: 0 success (a not-bracketed threshold is still success),
// 2 configuration error, 3 I/O error, 4 numerical failure.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "pbec/acceptance.hpp"
#include "pbec/config.hpp"
#include "pbec/report.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

pbec::cfg::RunConfig load(const std::string& path, const std::string& out_dir,
                          const std::string& engine) {
  auto config = pbec::cfg::RunConfig::from_file(path);
  if (!out_dir.empty()) config.output_dir = out_dir;
  if (!engine.empty()) {
    if (engine == "quantum")
      config.solver.engine = pbec::cfg::Engine::Quantum;
    else if (engine == "meanfield")
      config.solver.engine = pbec::cfg::Engine::MeanField;
    else
      throw pbec::cfg::ConfigError("--engine must be quantum or meanfield");
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dye-microcavity photon condensate toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, engine;
  bool json_report = false;
  bool inject_kappa_flip = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config)
      cmd->add_option("--config", config_path, "configuration file")
          ->required();
    cmd->add_option("--out", out_dir, "output directory (overrides config)");
  };

  auto* cmd_rates = app.add_subcommand("rates", "compute the full RateSet");
  add_common(cmd_rates, true);

  auto* cmd_evolve = app.add_subcommand("evolve", "integrate a trajectory");
  add_common(cmd_evolve, true);
  cmd_evolve->add_option("--engine", engine, "quantum|meanfield");

  auto* cmd_steady = app.add_subcommand("steady", "solve the steady state");
  add_common(cmd_steady, true);
  cmd_steady->add_option("--engine", engine, "quantum|meanfield");

  auto* cmd_scan = app.add_subcommand("scan", "pump scan with threshold");
  add_common(cmd_scan, true);

  int verify_only = 0;
  auto* cmd_verify =
      app.add_subcommand("verify", "run the built-in verification suite");
  cmd_verify->add_flag("--json", json_report, "machine-readable report");
  cmd_verify->add_option("--only", verify_only,
                         "run a single criterion (1..11)");
  cmd_verify
      ->add_flag("--inject-kappa-sign-flip", inject_kappa_flip,
                 "fault-injection hook: criterion 1 must fail")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_verify->parsed()) {
      pbec::acceptance::Options opts;
      opts.inject_kappa_sign_flip = inject_kappa_flip;
      opts.only = verify_only;
      const auto report = pbec::acceptance::run_all(
          opts, json_report ? nullptr : &std::cout);
      if (json_report) std::cout << pbec::acceptance::to_json(report);
      return report.all_pass ? kOk : kNumericalError;
    }

    const auto config = load(config_path, out_dir, engine);
    const std::string dir = config.output_dir;

    if (cmd_rates->parsed()) {
      auto artifacts = pbec::cli::run_rates(config);
      pbec::cli::write_rates(artifacts, dir);
      std::cout << artifacts.summary_text;
    } else if (cmd_evolve->parsed()) {
      pbec::cli::run_evolve(config, dir);
      std::cout << "wrote " << dir << "/trajectory.csv\n";
    } else if (cmd_steady->parsed()) {
      std::cout << pbec::cli::run_steady(config, dir);
    } else if (cmd_scan->parsed()) {
      auto artifacts = pbec::cli::run_scan(config, dir);
      std::cout << "wrote " << dir << "/scan.{csv,json,svg}";
      if (artifacts.scan.threshold)
        std::cout << "  threshold = " << *artifacts.scan.threshold
                  << " rad/s";
      else
        std::cout << "  threshold not bracketed";
      std::cout << "\n";
    }
    return kOk;
  } catch (const pbec::cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}

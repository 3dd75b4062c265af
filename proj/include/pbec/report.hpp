#pragma once

#include <string>

#include "pbec/config.hpp"
#include "pbec/meanfield.hpp"
#include "pbec/rates.hpp"

// Command drivers behind the CLI subcommands: pipeline orchestration
// (geometry -> rates -> dynamics -> reports) and file emission. Everything
// is deterministic: identical config -> identical bytes.
namespace pbec::cli {

inline constexpr const char* kVersion = "0.3.0";

struct RatesArtifacts {
  rates::AssembledRates assembled;
  rates::KennardStepanovReport ks;
  std::string rates_json;   // contract document + provenance keys
  std::string summary_text;
};

RatesArtifacts run_rates(const cfg::RunConfig& config);

// Writes rates.json and rates_summary.txt under out_dir.
void write_rates(const RatesArtifacts& a, const std::string& out_dir);

// engine = quantum: Lindblad RK4 trajectory; engine = meanfield: the rate
// equations marched with RK4. Returns the CSV text it wrote.
std::string run_evolve(const cfg::RunConfig& config,
                       const std::string& out_dir);

std::string run_steady(const cfg::RunConfig& config,
                       const std::string& out_dir);

struct ScanArtifacts {
  meanfield::ScanResult scan;
  std::string csv;
  std::string json;
  std::string svg;
};

ScanArtifacts run_scan(const cfg::RunConfig& config,
                       const std::string& out_dir);

void ensure_directory(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pbec::cli

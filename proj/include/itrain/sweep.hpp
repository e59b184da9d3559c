#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "itrain/simulator.hpp"

namespace itrain {

enum class ModelKind { exponential, one_ring };
enum class SweepMode { analytic, simulate, both };

// A sweep over (model parameter) x (array size) x (scheme) x (threshold).
struct SweepConfig {
  ModelKind model = ModelKind::exponential;
  std::vector<double> rho;      // exponential: |rho| values
  std::vector<double> spread_deg;  // one-ring: RMS angular spreads, degrees
  double mean_aod_deg = 45.0;
  double spacing = 0.5;
  int nodes = 2048;
  std::vector<int> antennas;
  std::vector<SchemeId> schemes;
  std::vector<double> alpha;    // resolved thresholds (possibly from rate/power)
  long trials = 100000;
  std::uint64_t seed = 42;
  SweepMode mode = SweepMode::both;
  std::string output;           // optional path from the config file
};

// Parses `key = value` lines ('#' comments). Throws ConfigError with the
// offending 1-based line number on any problem.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

struct SweepRow {
  std::string model;
  double rho_or_spread = 0.0;
  int antennas = 0;
  std::string scheme;
  double alpha = 0.0;
  std::optional<double> analytic_lt;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
  std::optional<double> outage_rate;
  long trials = 0;
  std::uint64_t seed = 0;
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Fixed header + one line per row, 10 significant digits, missing values
// empty. Byte-stable across runs with the same config.
std::string sweep_csv_header();
std::string to_csv(const std::vector<SweepRow>& rows);

// Configuration for fitting the training-length surrogate.
struct SurrogateConfig {
  int antennas = 32;
  std::vector<double> rho_grid;
  std::vector<double> alpha_grid;
  long trials = 10000;
  int epochs = 8000;
  double learning_rate = 0.01;
  std::uint64_t seed = 42;
  std::string model_out = "surrogate.model";
};

SurrogateConfig parse_surrogate_config(const std::string& text);
SurrogateConfig load_surrogate_config(const std::string& path);

}  // namespace itrain

#pragma once

// Experiment orchestration: run a validated configuration, evaluate the
// requested checks and write the artifact files.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nld/config.hpp"

namespace nld {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string anchor;  ///< the identity or estimate the check certifies
  std::string detail;
};

enum ExitStatus : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config_invalid = 2,
  exit_solver_abort = 3,
  exit_io = 4,
};

struct ExperimentResult {
  std::vector<CheckResult> checks;
  bool passed = false;
  int exit_status = exit_ok;
  std::optional<std::string> error;  ///< set when the solver aborted
  std::string summary_json;          ///< exact contents of summary.json
};

/// max over `samples` seeded random (u, v, alpha, beta) of
/// |charge_flux_defect| / (1 + |u|^2 |v|^2).
double identity_sweep(std::uint64_t seed, std::size_t samples);

/// Runs cfg and writes snapshots.csv, profiles.csv, residuals.csv,
/// balance.json and summary.json into output_dir (created if missing).
/// Solver failures are reported in the result, I/O failures throw.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& output_dir);

struct SweepRow {
  double h = 0.0;
  double charge_drift = 0.0;
  double triangle_defect = 0.0;    ///< max |defect| over the configured regions
  double solution_change = 0.0;    ///< L2 distance of the final state to the next finer level
  double residual_k = 0.0;         ///< max (l2^2 - tail_bound) / h^2 over record times
  double residual_k_sup = 0.0;     ///< max (sup - sup_tail_bound) / h^2
};

struct SweepResult {
  std::vector<SweepRow> rows;  ///< coarsest first
  std::string table;           ///< human-readable order table
  std::string csv;             ///< exact contents of sweep.csv
};

/// Refinement study at h, h/2, ..., h/2^halvings; writes sweep.csv.
SweepResult run_sweep(const ExperimentConfig& cfg, unsigned halvings, const std::string& output_dir);

}  // namespace nld

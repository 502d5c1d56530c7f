#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "frl/matrix.hpp"
#include "frl/objectives.hpp"
#include "frl/optim.hpp"
#include "frl/oracles.hpp"

namespace frl {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LossSpec {
  std::string kind;  // regression | whitened_regression | masked_completion | affine_distance
  Matrix d;          // regression / masked_completion target
  double scale = 0.5;
  Matrix mask;
  Matrix sigma_yx;
  Matrix sigma_xx;
  std::vector<double> u;  // affine_distance normal
  double c = 0.0;

  LossPtr build() const;
};

struct ModelSpec {
  std::string kind;  // factor_pair | chain | direct | hadamard
  Index m = 0, n = 0, r = 0;   // factor_pair (W = A B^T) or direct (plain W)
  std::vector<Index> dims;     // chain layer dimensions d_0, ..., d_L
  Index dim = 0;               // hadamard: w_i = a_i b_i, i in [dim]
};

struct InitSpec {
  std::string distribution = "gaussian";  // gaussian | constant
  double scale = 0.1;  // stddev for gaussian, the value itself for constant
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string name;
  LossSpec loss;
  ModelSpec model;
  InitSpec init;
  OptimizerConfig optimizer;
  std::vector<double> lambda_grid;
  long long steps = 0;
  long long record_every = 1;
  std::string output_dir;
  // Balance-decay fit window in optimizer steps; transients before lo are skipped.
  IndexWindow rate_window{50, 500};

  void validate() const;  // throws ConfigError naming the offending field
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::string& path);

struct CellSummary {
  std::size_t cell = 0;
  double lambda = 0.0;
  std::string status;  // ok | diverged
  long long final_step = 0;
  double final_loss = 0.0;
  double final_l2 = 0.0;
  double final_nuclear = 0.0;
  double final_reg_gap = 0.0;
  double final_balance = 0.0;
  double final_pseudo_rank = 0.0;
  double fitted_rate = 0.0;     // per-step balance decay; nan when not fittable
  double theory_rate = 0.0;     // -ln(1 - 2 eta lambda); nan when undefined
  double oracle_max_err = 0.0;  // vs svt_minimizer spectrum; nan when n/a
  std::vector<double> final_singular_values;
};

struct ExperimentResult {
  std::vector<CellSummary> cells;
  std::vector<std::string> trace_paths;
  std::string summary_path;
  bool any_diverged = false;
};

/// Runs one cell per lambda in the grid (seeds offset by cell index), writes
/// trace_<cell>.csv per cell plus summary.csv, and returns the summaries.
/// A diverged cell is marked in its summary; other cells are unaffected.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Runs a single cell without touching the filesystem.
Trace run_cell(const ExperimentConfig& config, double lambda, std::size_t cell_index);

/// CSV schema: step,loss,l2_loss,nuclear_loss,balance_gap_fro,reg_gap,
/// pseudo_rank,s1,...,sK with 17-significant-digit floats, rows in step order.
void emit_trace(const Trace& trace, const std::string& path);

std::vector<TraceRecord> load_trace_records(const std::string& path);

}  // namespace frl

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plad/lad_solver.hpp"
#include "plad/noise.hpp"

namespace plad {

enum class ScalePreset { Paper, Desk };
const char* to_string(ScalePreset preset) noexcept;
ScalePreset parse_scale_preset(const std::string& name);

/// One column of a study: a noise law, a PLAD penalty and the methods to run.
struct CellSpec {
  std::string id;
  std::string row_label;
  std::string column_label;
  NoiseModel noise;
  /// PLAD penalty: `lambda` when set, otherwise sqrt(penalty_factor n log p).
  std::optional<double> lambda;
  double penalty_factor = 2.0;
  bool plad = true;
  bool refit = false;
  bool lasso = false;
  /// Lasso penalty sigma * sqrt(2 n log p) (0.01 * ... when sigma = 0).
  double lasso_sigma = 1.0;
};

struct ExperimentConfig {
  int table = 0;  // 1, 2, 3, or 0 for a custom sweep
  ScalePreset preset = ScalePreset::Desk;
  Index n = 200;
  Index p = 400;
  Index k = 5;
  std::vector<double> beta_true;  // empty: 3 on the first k coordinates
  int reps = 50;
  std::uint64_t seed = 20240601;
  bool fixed_design = false;  // reuse one design for every replication
  bool theorem_check = false;  // evaluate the error bound per PLAD replication
  SolverOptions solver;
  std::vector<CellSpec> cells;

  Vector beta() const;
  double plad_lambda(const CellSpec& cell) const;
  double lasso_lambda(const CellSpec& cell) const;
  /// Throws DomainError on inconsistent sizes or settings.
  void validate() const;
};

/// Paper: reps = 200, Desk: reps = 50; n = 200, p = 400, k = 5 for both.
ExperimentConfig preset_config(ScalePreset preset, std::uint64_t seed = 20240601);
/// Cells of study 1 (penalty levels x noise), 2 (Gaussian sigma sweep with
/// the lasso) or 3 (heteroscedastic noise).
ExperimentConfig table_config(int table, ScalePreset preset, std::uint64_t seed = 20240601);
/// Applies a JSON override (top-level settings and per-cell patches).
void apply_config_override(ExperimentConfig& config, const std::string& json_text);

struct MethodOutcome {
  bool ran = false;
  bool ok = false;
  std::string error;
  std::string status;
  double sq_error = 0.0;  // ||beta_hat - beta||_2^2
  double l2_error = 0.0;
  Index type_i = 0;
  Index type_ii = 0;
  Index support_size = 0;
  double kkt_gap = 0.0;
  double seconds = 0.0;

  bool operator==(const MethodOutcome&) const = default;
};

struct TheoremCheck {
  bool measured = false;
  double a = 0.0;
  double eta_l = 0.0;
  double lambda_u = 0.0;
  double error_bound = 0.0;
  bool condition_i = false;
  bool within_bound = false;  // ||beta_hat - beta||_2 <= error_bound

  bool operator==(const TheoremCheck&) const = default;
};

struct ReplicationRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  MethodOutcome plad;
  MethodOutcome refit;
  MethodOutcome lasso;
  TheoremCheck theorem;

  bool operator==(const ReplicationRecord&) const = default;
};

struct CellReport {
  std::string id;
  std::string row_label;
  std::string column_label;
  std::string noise_family;
  double noise_scale = 0.0;
  double lambda = 0.0;
  double lasso_lambda = 0.0;
  std::vector<ReplicationRecord> replications;
  std::vector<std::pair<std::string, double>> metrics;  // ordered aggregates
  int failures = 0;

  std::optional<double> metric(const std::string& name) const;
  bool operator==(const CellReport&) const = default;
};

struct ConfigEcho {
  int table = 0;
  std::string preset;
  Index n = 0;
  Index p = 0;
  Index k = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  bool fixed_design = false;
  bool theorem_check = false;
  std::vector<double> beta_true;

  bool operator==(const ConfigEcho&) const = default;
};

struct ExperimentReport {
  int format_version = 1;
  ConfigEcho config;
  std::vector<CellReport> cells;
  double seconds = 0.0;

  const CellReport* cell(const std::string& id) const;
  bool complete() const;  // no replication failed
  bool operator==(const ExperimentReport&) const = default;
};

/// Seed of replication `rep` in cell `cell`: derived from (config seed, cell id, rep).
std::uint64_t replication_seed(const ExperimentConfig& config, const CellSpec& cell, int rep);
/// Normalized i.i.d. N(0, 1) design used by that replication.
DesignMatrix replication_design(const ExperimentConfig& config, const CellSpec& cell, int rep);

/// Fits every method of one replication; solver failures are recorded, not thrown.
ReplicationRecord run_replication(const ExperimentConfig& config, std::size_t cell_index, int rep);
/// Runs all cells and replications on worker_count() threads and aggregates.
ExperimentReport run_experiment(const ExperimentConfig& config);
ExperimentReport run_table(int table, ScalePreset preset, std::uint64_t seed = 20240601);

/// Recomputes CellReport::metrics and failures from the replications.
void aggregate(CellReport& cell);

}  // namespace plad

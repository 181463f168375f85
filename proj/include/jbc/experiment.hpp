#pragma once

#include "jbc/pipeline.hpp"
#include "jbc/scenario.hpp"
#include "jbc/types.hpp"

#include <string>
#include <vector>

namespace jbc {

struct ExperimentConfig {
  Scenario scenario;
  std::vector<double> gamma_db_sweep{4.0};
  std::vector<double> cbar_sweep{3.0};
  int num_realizations = 200;
  DualIterConfig dual;
  PrimalIterConfig primal;
  double cert_tol = 1e-7;
  std::string output_dir = "out";
  int parallelism = 0;  // 0 picks the hardware concurrency
  void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);

// One row of a sweep or bench run. Realization r uses scenario seed
// base_seed + r; all grid points of a realization share one channel draw.
struct RunRecord {
  std::uint64_t seed = 0;
  double gamma_db = 0.0;
  double cbar = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  double total_power = 0.0;
  double dual_obj = 0.0;
  double gap_rel = 0.0;
  long dual_iters = 0;
  long primal_iters = 0;
  double rate_bound = 0.0;
  double rate_practical = 0.0;
  double t_dual = 0.0;
  double t_primal = 0.0;
  double t_certify = 0.0;
};

// Runs the full (realization x gamma x cbar) grid on a worker pool. Output
// order is deterministic and independent of scheduling.
std::vector<RunRecord> run_sweep(const ExperimentConfig& cfg,
                                 bool rate_diagnostics);

void write_runs_csv(const std::vector<RunRecord>& rows,
                    const std::string& path);

// Per-grid-point aggregates over realizations.
void write_summary_csv(const std::vector<RunRecord>& rows,
                       const std::string& path);

// Timing-focused columns for bench output.
void write_bench_csv(const std::vector<RunRecord>& rows,
                     const std::string& path);

}  // namespace jbc

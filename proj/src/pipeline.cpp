#include "jbc/pipeline.hpp"

#include "jbc/diagnostics.hpp"
#include "jbc/dual.hpp"
#include "jbc/primal.hpp"
#include "jbc/verify.hpp"

#include <chrono>

namespace jbc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SolveResult solve(const ProblemInstance& inst, const SolveOptions& opts) {
  inst.validate();
  SolveResult res;
  const auto t_start = std::chrono::steady_clock::now();

  DualIterConfig dual_cfg = opts.dual;
  dual_cfg.record_iterates = dual_cfg.record_iterates || opts.rate_diagnostics;

  const auto t0 = std::chrono::steady_clock::now();
  DualRun dual_run = solve_dual(inst, dual_cfg);
  res.t_dual = seconds_since(t0);

  res.report.dual_iters = dual_run.iterations;
  res.report.dual_trace = dual_run.objective_trace;
  res.report.dual_step_trace = dual_run.step_trace;
  res.report.dual_objective = dual_run.objective_trace.back();

  if (dual_run.status != SolveStatus::Optimal) {
    res.status = dual_run.status;
    res.report.status = dual_run.status;
    res.report.wall_time = seconds_since(t_start);
    return res;
  }

  const auto t1 = std::chrono::steady_clock::now();
  const std::vector<CVec> dirs = beam_directions(inst, dual_run.solution);
  PrimalRun primal_run = solve_primal(inst, dual_run.solution, dirs, opts.primal);
  res.t_primal = seconds_since(t1);

  res.report.primal_iters = primal_run.iterations;
  res.report.primal_trace = primal_run.objective_trace;
  res.report.primal_step_trace = primal_run.step_trace;
  res.report.primal_objective = primal_run.objective_trace.back();

  if (primal_run.status != SolveStatus::Optimal) {
    res.status = primal_run.status;
    res.report.status = primal_run.status;
    res.report.wall_time = seconds_since(t_start);
    return res;
  }

  res.primal = assemble_solution(primal_run.p, primal_run.Q, dirs);
  res.dual = dual_run.solution;
  res.has_solution = true;

  const auto t2 = std::chrono::steady_clock::now();
  const Certification cert = certify(inst, res.primal, res.dual, opts.cert_tol);
  res.t_certify = seconds_since(t2);

  res.report.kkt_residuals = cert.residuals;
  res.report.duality_gap_rel = cert.duality_gap_rel;
  res.report.primal_objective = cert.primal_objective;
  res.report.dual_objective = cert.dual_objective;

  res.report.rate_bound = dual_rate_bound(inst, dual_run.beta);
  const auto radii = primal_spectral_radii(inst, res.dual, dirs);
  res.report.rho_probed = radii.first;
  res.report.rho_closed_form = radii.second;
  if (opts.rate_diagnostics) {
    const RateMeasurement m = measure_dual_rate(inst, dual_run, dual_cfg);
    res.report.rate_practical = m.practical;
  }

  res.status = cert.pass ? SolveStatus::Optimal : SolveStatus::IterationLimit;
  res.report.status = res.status;
  res.report.wall_time = seconds_since(t_start);
  return res;
}

}  // namespace jbc

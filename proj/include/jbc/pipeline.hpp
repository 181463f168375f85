#pragma once

#include "jbc/types.hpp"

namespace jbc {

struct SolveOptions {
  DualIterConfig dual;
  PrimalIterConfig primal;
  double cert_tol = 1e-7;
  // Also measure the practical dual convergence factor (costs one extra
  // tightly-converged dual run).
  bool rate_diagnostics = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::IterationLimit;
  SolveReport report;
  bool has_solution = false;  // primal/dual below are valid
  PrimalSolution primal;
  DualSolution dual;
  double t_dual = 0.0;
  double t_primal = 0.0;
  double t_certify = 0.0;
};

// End-to-end solve: dual fixed point, beam recovery, primal fixed point,
// certification, diagnostics. The report's status is Optimal only when the
// certificate passed at cert_tol.
SolveResult solve(const ProblemInstance& inst, const SolveOptions& opts = {});

}  // namespace jbc

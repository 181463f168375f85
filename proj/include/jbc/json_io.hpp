#pragma once

#include "jbc/types.hpp"

#include <string>

namespace jbc {

// Instance files: {"M", "K", "channels" (K rows of M [re, im] pairs),
// "sigma2", "gamma_db", "cbar"}. Matrices elsewhere are row-major arrays of
// [re, im] pairs.
ProblemInstance load_instance(const std::string& path);
void save_instance(const ProblemInstance& inst, const std::string& path);

struct SolutionBundle {
  PrimalSolution primal;
  DualSolution dual;
};

SolutionBundle load_solution(const std::string& path);
void save_solution(const SolutionBundle& bundle, const std::string& path);

void save_report(const SolveReport& report, const std::string& path);

// Trace CSV: one row per iteration with the objective and the sup-norm of
// the iterate step.
void save_trace_csv(const std::vector<double>& objective,
                    const std::vector<double>& step,
                    const std::string& objective_column,
                    const std::string& path);

}  // namespace jbc

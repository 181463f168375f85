#pragma once

#include "jbc/types.hpp"

namespace jbc {

// I + sum_k beta_k h_k h_k^H. Positive definite for any beta >= 0.
CMat uplink_covariance(const ProblemInstance& inst, const Vec& beta);

// Capacity-weighted Schur complement step: removes the leading coordinate of
// a Hermitian matrix with the pivot inflated by eta/(eta-1). Returns an
// (n-1)x(n-1) matrix; throws PivotError when the pivot is numerically zero.
CMat schur_step(const CMat& gamma, double eta);

struct FronthaulMultipliers {
  std::vector<CMat> lambdas;     // M matrices, rank one
  std::vector<CVec> vectors;     // factor vectors, zeros below index m
  Vec diag;                      // diag[m] == lambdas[m](m, m)
};

// Sequential construction of the fronthaul multipliers from the uplink
// covariance at beta. lambdas[m] vanishes outside the trailing (m..M-1)
// block and has real positive (m,m) entry.
FronthaulMultipliers fronthaul_multipliers(const ProblemInstance& inst,
                                           const Vec& beta);

// Only the diagonal entries lambdas[m](m,m); cheaper than the full set.
Vec fronthaul_multiplier_diag(const ProblemInstance& inst, const Vec& beta);

// Frobenius norm of the dual stationarity matrix assembled from beta and the
// given multipliers. Exactly zero (up to roundoff) for multipliers produced
// by fronthaul_multipliers.
double dual_stationarity_residual(const ProblemInstance& inst, const Vec& beta,
                                  const std::vector<CMat>& lambdas);

// Per-user uplink covariance with user k excluded and the fronthaul
// multiplier diagonal added: I + sum_{j != k} beta_j h_j h_j^H + diag(lam).
CMat uplink_covariance_excl(const ProblemInstance& inst, const Vec& beta,
                            const Vec& lam_diag, int k);

// The dual fixed-point update: component k is gamma_k divided by the matched
// filter SNR of user k against uplink_covariance_excl. Standard interference
// function: positive, monotone, strictly subhomogeneous.
Vec dual_interference_map(const ProblemInstance& inst, const Vec& beta,
                          bool fast_eval = false);

struct DualRun {
  SolveStatus status = SolveStatus::IterationLimit;
  Vec beta;                           // final iterate
  DualSolution solution;              // populated when status == Optimal
  std::vector<double> objective_trace;  // sum_k beta_k sigma2_k per iterate
  std::vector<double> step_trace;       // sup-norm of the iterate step
  std::vector<Vec> iterates;            // filled when record_iterates is set
  long iterations = 0;
};

// Fixed-point iteration on the dual multipliers from beta0 (all zeros by
// default). Declares Infeasible when the dual objective exceeds power_cap.
DualRun solve_dual(const ProblemInstance& inst, const DualIterConfig& cfg);

}  // namespace jbc

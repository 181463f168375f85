#pragma once

#include "jbc/types.hpp"

namespace jbc {

// Achieved SINR of user k under the candidate solution.
double sinr(const ProblemInstance& inst, const PrimalSolution& sol, int k);

// Fronthaul rate at relay m: log2 of received power over the generalized
// Schur complement of the compression covariance at coordinate m. Returns 0
// when both the complement and the received power vanish, +infinity when
// only the complement does.
double fronthaul_rate(const ProblemInstance& inst, const PrimalSolution& sol,
                      int m);

// The PSD reformulation of the fronthaul constraint at relay m.
CMat fronthaul_block(const ProblemInstance& inst, const PrimalSolution& sol,
                     int m);

// Minimum eigenvalue of fronthaul_block; nonnegative (up to roundoff) iff
// the rate constraint holds.
double fronthaul_psd_margin(const ProblemInstance& inst,
                            const PrimalSolution& sol, int m);

struct Certification {
  bool pass = false;
  double tol = 0.0;
  std::map<std::string, double> residuals;
  double duality_gap_rel = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
};

// Optimality certificate: checks primal feasibility, dual stationarity,
// complementary slackness, and the duality gap, each as a residual relative
// to its natural scale (absolute floor 1e-12). Independent of how the
// candidate pair was produced.
Certification certify(const ProblemInstance& inst, const PrimalSolution& sol,
                      const DualSolution& dual, double tol);

}  // namespace jbc

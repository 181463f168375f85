#pragma once

#include "jbc/dual.hpp"
#include "jbc/scenario.hpp"
#include "jbc/types.hpp"

#include <utility>

namespace jbc {

// Part-metric distance between two strictly positive vectors:
// max_k |ln(a_k / b_k)|. Throws DomainError on nonpositive entries.
double thompson_metric(const Vec& a, const Vec& b);

// Largest spectral norm over users of the excluded-self uplink covariance
// minus the identity, evaluated at beta.
double dual_coupling_norm(const ProblemInstance& inst, const Vec& beta);

// Asymptotic contraction factor bound for the dual iteration at the fixed
// point: c / (1 + c) with c the coupling norm there.
double dual_rate_bound(const ProblemInstance& inst, const Vec& beta_star);

// Spectral radius of the linear part of the power update map, measured two
// ways: probed column-by-column from the map itself, and assembled from the
// closed-form entries that reuse each row's own compression response. The
// two coincide for K == 1.
std::pair<double, double> primal_spectral_radii(
    const ProblemInstance& inst, const DualSolution& dual,
    const std::vector<CVec>& directions);

struct RateMeasurement {
  double practical = 0.0;   // mean tail ratio of part-metric distances
  double theoretical = 0.0; // contraction factor bound at the fixed point
  long iterations = 0;      // iterations of the measured run
  Vec beta_star;            // tightly converged fixed point
};

// Runs the dual iteration at cfg, then continues to tol 1e-13 to locate the
// fixed point, and estimates the practical convergence factor from the last
// 20 pre-convergence iterations (excluding the final 3). Throws Error when
// the run does not converge.
RateMeasurement measure_dual_rate(const ProblemInstance& inst,
                                  DualIterConfig cfg);

// Same estimate from an already-recorded convergent run (its config must
// have had record_iterates set).
RateMeasurement measure_dual_rate(const ProblemInstance& inst,
                                  const DualRun& run,
                                  const DualIterConfig& cfg);

struct RateRow {
  double gamma_db = 0.0;
  double theoretical = 0.0;
  double practical = 0.0;
  long iterations = 0;
};

// One scenario draw per SINR target: theoretical vs practical convergence
// factor and the iteration count at cfg.tol.
std::vector<RateRow> rate_table(const Scenario& sc,
                                const std::vector<double>& gamma_db_list,
                                double cbar, const DualIterConfig& cfg);

}  // namespace jbc

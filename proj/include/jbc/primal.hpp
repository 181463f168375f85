#pragma once

#include "jbc/types.hpp"

#include <utility>

namespace jbc {

// Unit-norm beam directions from the converged dual: the matched filter of
// each user against its excluded-self uplink covariance, phased so the own
// channel response is real positive.
std::vector<CVec> beam_directions(const ProblemInstance& inst,
                                  const DualSolution& dual);

// Compression covariance assembled from beam powers by the backward
// closed-form recursion that saturates every fronthaul constraint. Linear
// and monotone in p; PSD for p >= 0.
CMat compression_covariance(const ProblemInstance& inst, const Vec& p,
                            const DualSolution& dual,
                            const std::vector<CVec>& directions);

// Evaluates the power update map and the rank-one channel gains it needs
// once, so the per-iteration cost stays quadratic in the dimensions.
class PowerMapEvaluator {
 public:
  PowerMapEvaluator(const ProblemInstance& inst, const DualSolution& dual,
                    const std::vector<CVec>& directions);

  // Smallest per-user powers meeting every SINR target with equality given
  // the interference the current powers create.
  Vec map(const Vec& p) const;

  CMat covariance(const Vec& p) const { return compression_covariance(*inst_, p, *dual_, *directions_); }
  double objective(const Vec& p) const;  // sum p + tr Q(p)

 private:
  const ProblemInstance* inst_;
  const DualSolution* dual_;
  const std::vector<CVec>* directions_;
  Eigen::MatrixXd cross_gain_;  // |h_k^H vhat_j|^2
  Vec own_gain_;                // |h_k^H vhat_k|^2
};

// Single application of the power update map (convenience wrapper).
Vec primal_interference_map(const ProblemInstance& inst, const Vec& p,
                            const DualSolution& dual,
                            const std::vector<CVec>& directions);

struct PrimalRun {
  SolveStatus status = SolveStatus::IterationLimit;
  Vec p;
  CMat Q;
  std::vector<double> objective_trace;
  std::vector<double> step_trace;
  std::vector<Vec> iterates;
  long iterations = 0;
};

PrimalRun solve_primal(const ProblemInstance& inst, const DualSolution& dual,
                       const std::vector<CVec>& directions,
                       const PrimalIterConfig& cfg);

// Cross-check path: probes the affine power update map for its constant and
// linear parts and solves the resulting linear system directly. Throws
// NotContractiveError when the probed map has spectral radius >= 1.
std::pair<Vec, CMat> solve_primal_linear(const ProblemInstance& inst,
                                         const DualSolution& dual,
                                         const std::vector<CVec>& directions);

PrimalSolution assemble_solution(const Vec& p, const CMat& q,
                                 const std::vector<CVec>& directions);

}  // namespace jbc

#include "jbc/primal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "jbc/dual.hpp"

#include <cmath>
#include <sstream>

namespace jbc {

namespace {

constexpr double kDegenerateFloor = 1e-14;

void check_powers(const ProblemInstance& inst, const Vec& p) {
  if (p.size() != inst.K) throw DomainError("power vector length mismatch");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw DomainError("powers must be nonnegative and finite");
    }
  }
}

void check_dual_shapes(const ProblemInstance& inst, const DualSolution& dual,
                       const std::vector<CVec>& directions) {
  if (dual.beta.size() != inst.K) throw DomainError("dual beta length mismatch");
  if (static_cast<int>(dual.lambda_vectors.size()) != inst.M) {
    throw DomainError("expected one multiplier vector per relay");
  }
  if (static_cast<int>(directions.size()) != inst.K) {
    throw DomainError("expected one beam direction per user");
  }
}

}  // namespace

std::vector<CVec> beam_directions(const ProblemInstance& inst,
                                  const DualSolution& dual) {
  if (dual.beta.size() != inst.K) throw DomainError("dual beta length mismatch");
  if (static_cast<int>(dual.lambdas.size()) != inst.M) {
    throw DomainError("expected one multiplier matrix per relay");
  }
  Vec lam_diag(inst.M);
  for (int m = 0; m < inst.M; ++m) lam_diag[m] = dual.lambdas[m](m, m).real();

  std::vector<CVec> dirs;
  dirs.reserve(inst.K);
  for (int k = 0; k < inst.K; ++k) {
    const CMat c = uplink_covariance_excl(inst, dual.beta, lam_diag, k);
    Eigen::LLT<CMat> llt(c);
    if (llt.info() != Eigen::Success) throw Error("uplink covariance factorization failed");
    CVec d = llt.solve(inst.channels[k]);
    const double nrm = d.norm();
    if (nrm <= kDegenerateFloor) {
      std::ostringstream os;
      os << "matched filter for user " << k << " vanished";
      throw DegenerateDirectionError(os.str());
    }
    d /= nrm;
    const Complex response = inst.channels[k].dot(d);
    const double mag = std::abs(response);
    if (mag <= kDegenerateFloor) {
      std::ostringstream os;
      os << "beam direction for user " << k << " is orthogonal to its channel";
      throw DegenerateDirectionError(os.str());
    }
    d *= std::conj(response) / mag;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

CMat compression_covariance(const ProblemInstance& inst, const Vec& p,
                            const DualSolution& dual,
                            const std::vector<CVec>& directions) {
  check_powers(inst, p);
  check_dual_shapes(inst, dual, directions);
  const int M = inst.M;

  // Power collected at each relay from the scaled beam directions.
  Vec relay_power = Vec::Zero(M);
  for (int k = 0; k < inst.K; ++k) {
    for (int m = 0; m < M; ++m) {
      relay_power[m] += p[k] * std::norm(directions[k][m]);
    }
  }

  CMat q = CMat::Zero(M, M);
  for (int m = M - 1; m >= 0; --m) {
    const double eta = std::exp2(inst.cbar[m]);
    const CVec& lam = dual.lambda_vectors[m];
    if (lam.size() != M) throw DomainError("multiplier vector has wrong length");
    const double head = lam[m].real();
    if (head <= kDegenerateFloor || std::abs(lam[m].imag()) > kDegenerateFloor * (1.0 + head)) {
      std::ostringstream os;
      os << "multiplier vector " << m << " has degenerate leading entry";
      throw DegenerateDualError(os.str());
    }
    const Eigen::Index tail = M - 1 - m;
    if (tail > 0) {
      const CVec lam_tail = lam.tail(tail);
      const CMat q_tail = q.bottomRightCorner(tail, tail);
      const CVec coupled = q_tail * lam_tail;
      q.col(m).tail(tail) = -coupled / head;
      q.row(m).tail(tail) = q.col(m).tail(tail).adjoint();
      const double quad = lam_tail.dot(coupled).real();
      q(m, m) = eta / (eta - 1.0) * quad / (head * head) +
                relay_power[m] / (eta - 1.0);
    } else {
      q(m, m) = relay_power[m] / (eta - 1.0);
    }
  }
  return q;
}

PowerMapEvaluator::PowerMapEvaluator(const ProblemInstance& inst,
                                     const DualSolution& dual,
                                     const std::vector<CVec>& directions)
    : inst_(&inst), dual_(&dual), directions_(&directions) {
  check_dual_shapes(inst, dual, directions);
  const int K = inst.K;
  cross_gain_.resize(K, K);
  own_gain_.resize(K);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j) {
      cross_gain_(k, j) = std::norm(inst.channels[k].dot(directions[j]));
    }
    own_gain_[k] = cross_gain_(k, k);
    if (own_gain_[k] <= kDegenerateFloor * inst.channels[k].squaredNorm()) {
      std::ostringstream os;
      os << "beam direction for user " << k << " is orthogonal to its channel";
      throw DegenerateDirectionError(os.str());
    }
  }
}

Vec PowerMapEvaluator::map(const Vec& p) const {
  check_powers(*inst_, p);
  const int K = inst_->K;
  const CMat q = covariance(p);
  Vec out(K);
  for (int k = 0; k < K; ++k) {
    double interference = 0.0;
    for (int j = 0; j < K; ++j) {
      if (j != k) interference += p[j] * cross_gain_(k, j);
    }
    const double compression =
        inst_->channels[k].dot(q * inst_->channels[k]).real();
    out[k] = inst_->gamma[k] *
             (interference + compression + inst_->sigma2[k]) / own_gain_[k];
  }
  return out;
}

double PowerMapEvaluator::objective(const Vec& p) const {
  return p.sum() + covariance(p).trace().real();
}

Vec primal_interference_map(const ProblemInstance& inst, const Vec& p,
                            const DualSolution& dual,
                            const std::vector<CVec>& directions) {
  return PowerMapEvaluator(inst, dual, directions).map(p);
}

PrimalRun solve_primal(const ProblemInstance& inst, const DualSolution& dual,
                       const std::vector<CVec>& directions,
                       const PrimalIterConfig& cfg) {
  cfg.validate();
  PowerMapEvaluator eval(inst, dual, directions);
  PrimalRun run;
  Vec p = cfg.p0.size() > 0 ? cfg.p0 : Vec::Zero(inst.K).eval();
  if (p.size() != inst.K) throw DomainError("p0 length mismatch");

  run.objective_trace.push_back(eval.objective(p));
  run.step_trace.push_back(0.0);
  if (cfg.record_iterates) run.iterates.push_back(p);

  for (long it = 1; it <= cfg.max_iter; ++it) {
    Vec next = eval.map(p);
    run.objective_trace.push_back(eval.objective(next));
    run.step_trace.push_back((next - p).lpNorm<Eigen::Infinity>());
    if (cfg.record_iterates) run.iterates.push_back(next);
    run.iterations = it;

    double rel_change = 0.0;
    for (int k = 0; k < inst.K; ++k) {
      rel_change = std::max(rel_change, std::abs(next[k] - p[k]) / next[k]);
    }
    p = std::move(next);
    if (rel_change <= cfg.tol) {
      run.status = SolveStatus::Optimal;
      run.p = p;
      run.Q = eval.covariance(p);
      return run;
    }
  }
  run.status = SolveStatus::IterationLimit;
  run.p = std::move(p);
  run.Q = eval.covariance(run.p);
  return run;
}

std::pair<Vec, CMat> solve_primal_linear(const ProblemInstance& inst,
                                         const DualSolution& dual,
                                         const std::vector<CVec>& directions) {
  PowerMapEvaluator eval(inst, dual, directions);
  const int K = inst.K;
  const Vec constant = eval.map(Vec::Zero(K));
  Eigen::MatrixXd gain(K, K);
  for (int j = 0; j < K; ++j) {
    gain.col(j) = eval.map(Vec::Unit(K, j)) - constant;
  }
  const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(gain, false).eigenvalues();
  const double rho = eigs.cwiseAbs().maxCoeff();
  if (rho >= 1.0) {
    std::ostringstream os;
    os << "power update map has spectral radius " << rho;
    throw NotContractiveError(os.str());
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(K, K) - gain;
  const Vec p = Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(constant);
  return {p, eval.covariance(p)};
}

PrimalSolution assemble_solution(const Vec& p, const CMat& q,
                                 const std::vector<CVec>& directions) {
  if (static_cast<Eigen::Index>(directions.size()) != p.size()) {
    throw DomainError("powers and directions disagree in length");
  }
  PrimalSolution sol;
  sol.powers = p;
  sol.Q = q;
  sol.directions = directions;
  sol.beamformers.reserve(directions.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (!(p[k] >= 0.0)) throw DomainError("powers must be nonnegative");
    sol.beamformers.push_back(std::sqrt(p[k]) * directions[k]);
  }
  return sol;
}

}  // namespace jbc

#include "jbc/dual.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace jbc {

namespace {

constexpr double kPivotFloor = 1e-14;

void check_beta(const ProblemInstance& inst, const Vec& beta) {
  if (beta.size() != inst.K) throw DomainError("beta length mismatch");
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (!std::isfinite(beta[i]) || beta[i] < 0.0) {
      throw DomainError("beta must be nonnegative and finite");
    }
  }
}

}  // namespace

CMat uplink_covariance(const ProblemInstance& inst, const Vec& beta) {
  check_beta(inst, beta);
  CMat g = CMat::Identity(inst.M, inst.M);
  for (int k = 0; k < inst.K; ++k) {
    if (beta[k] != 0.0) {
      g.noalias() += beta[k] * inst.channels[k] * inst.channels[k].adjoint();
    }
  }
  return g;
}

CMat schur_step(const CMat& gamma, double eta) {
  const Eigen::Index n = gamma.rows();
  if (n < 1 || gamma.cols() != n) throw DomainError("schur_step needs a square nonempty matrix");
  if (!(eta > 1.0)) throw DomainError("schur_step needs eta > 1");
  const double pivot = gamma(0, 0).real();
  if (pivot <= kPivotFloor) {
    std::ostringstream os;
    os << "schur_step pivot " << pivot << " below floor";
    throw PivotError(os.str());
  }
  const double scale = (eta - 1.0) / eta / pivot;
  CMat out = gamma.bottomRightCorner(n - 1, n - 1);
  out.noalias() -= scale * gamma.col(0).tail(n - 1) * gamma.row(0).tail(n - 1);
  return out;
}

FronthaulMultipliers fronthaul_multipliers(const ProblemInstance& inst,
                                           const Vec& beta) {
  const int M = inst.M;
  FronthaulMultipliers out;
  out.lambdas.reserve(M);
  out.vectors.reserve(M);
  out.diag.resize(M);

  CMat trailing = uplink_covariance(inst, beta);
  for (int m = 0; m < M; ++m) {
    const double eta = std::exp2(inst.cbar[m]);
    const double pivot = trailing(0, 0).real();
    if (pivot <= kPivotFloor) {
      std::ostringstream os;
      os << "multiplier recursion pivot " << pivot << " at relay " << m;
      throw PivotError(os.str());
    }
    CVec factor = CVec::Zero(M);
    const double head = std::sqrt(pivot / (eta - 1.0));
    factor[m] = head;
    const Eigen::Index tail = trailing.rows() - 1;
    if (tail > 0) {
      factor.tail(tail) = trailing.col(0).tail(tail) / (eta * head);
    }
    out.lambdas.push_back(factor * factor.adjoint());
    out.vectors.push_back(std::move(factor));
    out.diag[m] = pivot / (eta - 1.0);
    if (tail > 0) trailing = schur_step(trailing, eta);
  }
  return out;
}

Vec fronthaul_multiplier_diag(const ProblemInstance& inst, const Vec& beta) {
  Vec diag(inst.M);
  CMat trailing = uplink_covariance(inst, beta);
  for (int m = 0; m < inst.M; ++m) {
    const double eta = std::exp2(inst.cbar[m]);
    const double pivot = trailing(0, 0).real();
    if (pivot <= kPivotFloor) {
      std::ostringstream os;
      os << "multiplier recursion pivot " << pivot << " at relay " << m;
      throw PivotError(os.str());
    }
    diag[m] = pivot / (eta - 1.0);
    if (trailing.rows() > 1) trailing = schur_step(trailing, eta);
  }
  return diag;
}

double dual_stationarity_residual(const ProblemInstance& inst, const Vec& beta,
                                  const std::vector<CMat>& lambdas) {
  const int M = inst.M;
  if (static_cast<int>(lambdas.size()) != M) {
    throw DomainError("expected one multiplier matrix per relay");
  }
  CMat d = uplink_covariance(inst, beta);
  for (int m = 0; m < M; ++m) {
    const auto& lam = lambdas[m];
    if (lam.rows() != M || lam.cols() != M) {
      throw DomainError("multiplier matrix has wrong dimensions");
    }
    const double eta = std::exp2(inst.cbar[m]);
    d(m, m) += lam(m, m);
    const Eigen::Index span = M - m;
    d.bottomRightCorner(span, span) -= eta * lam.bottomRightCorner(span, span);
  }
  return d.norm();
}

CMat uplink_covariance_excl(const ProblemInstance& inst, const Vec& beta,
                            const Vec& lam_diag, int k) {
  CMat c = CMat::Identity(inst.M, inst.M);
  c.diagonal() += lam_diag.cast<Complex>();
  for (int j = 0; j < inst.K; ++j) {
    if (j == k || beta[j] == 0.0) continue;
    c.noalias() += beta[j] * inst.channels[j] * inst.channels[j].adjoint();
  }
  return c;
}

Vec dual_interference_map(const ProblemInstance& inst, const Vec& beta,
                          bool fast_eval) {
  check_beta(inst, beta);
  const Vec lam_diag = fronthaul_multiplier_diag(inst, beta);
  Vec out(inst.K);
  if (fast_eval) {
    // One factorization of the full covariance; each user's excluded-self
    // quadratic form follows from a rank-one downdate identity.
    CMat full = uplink_covariance(inst, beta);
    full.diagonal() += lam_diag.cast<Complex>();
    Eigen::LLT<CMat> llt(full);
    if (llt.info() != Eigen::Success) throw Error("uplink covariance factorization failed");
    for (int k = 0; k < inst.K; ++k) {
      const CVec x = llt.solve(inst.channels[k]);
      const double t = inst.channels[k].dot(x).real();
      out[k] = inst.gamma[k] * (1.0 / t - beta[k]);
    }
  } else {
    for (int k = 0; k < inst.K; ++k) {
      const CMat c = uplink_covariance_excl(inst, beta, lam_diag, k);
      Eigen::LLT<CMat> llt(c);
      if (llt.info() != Eigen::Success) throw Error("uplink covariance factorization failed");
      const CVec x = llt.solve(inst.channels[k]);
      out[k] = inst.gamma[k] / inst.channels[k].dot(x).real();
    }
  }
  return out;
}

DualRun solve_dual(const ProblemInstance& inst, const DualIterConfig& cfg) {
  cfg.validate();
  DualRun run;
  Vec beta = cfg.beta0.size() > 0 ? cfg.beta0 : Vec::Zero(inst.K).eval();
  if (beta.size() != inst.K) throw DomainError("beta0 length mismatch");

  run.objective_trace.push_back(beta.dot(inst.sigma2));
  run.step_trace.push_back(0.0);
  if (cfg.record_iterates) run.iterates.push_back(beta);

  for (long it = 1; it <= cfg.max_iter; ++it) {
    Vec next = dual_interference_map(inst, beta, cfg.fast_eval);
    const double objective = next.dot(inst.sigma2);
    run.objective_trace.push_back(objective);
    run.step_trace.push_back((next - beta).lpNorm<Eigen::Infinity>());
    if (cfg.record_iterates) run.iterates.push_back(next);
    run.iterations = it;

    if (objective > cfg.power_cap) {
      run.status = SolveStatus::Infeasible;
      run.beta = std::move(next);
      return run;
    }

    double rel_change = 0.0;
    for (int k = 0; k < inst.K; ++k) {
      rel_change = std::max(rel_change, std::abs(next[k] - beta[k]) / next[k]);
    }
    beta = std::move(next);
    if (rel_change <= cfg.tol) {
      run.status = SolveStatus::Optimal;
      run.beta = beta;
      auto mult = fronthaul_multipliers(inst, beta);
      run.solution.beta = beta;
      run.solution.lambdas = std::move(mult.lambdas);
      run.solution.lambda_vectors = std::move(mult.vectors);
      return run;
    }
  }
  run.status = SolveStatus::IterationLimit;
  run.beta = std::move(beta);
  return run;
}

}  // namespace jbc

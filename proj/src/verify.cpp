#include "jbc/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace jbc {

namespace {

constexpr double kScaleFloor = 1e-12;
constexpr double kEigCutoffRel = 1e-12;

void check_solution_shapes(const ProblemInstance& inst,
                           const PrimalSolution& sol) {
  if (static_cast<int>(sol.beamformers.size()) != inst.K) {
    throw DomainError("expected one beamformer per user");
  }
  for (const auto& v : sol.beamformers) {
    if (v.size() != inst.M) throw DomainError("beamformer has wrong length");
  }
  if (sol.Q.rows() != inst.M || sol.Q.cols() != inst.M) {
    throw DomainError("compression covariance has wrong dimensions");
  }
}

// Received power at relay m: own beam contributions plus compression noise.
double relay_signal_power(const PrimalSolution& sol, int m) {
  double s = sol.Q(m, m).real();
  for (const auto& v : sol.beamformers) s += std::norm(v[m]);
  return s;
}

double min_eig(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_norm(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double sinr(const ProblemInstance& inst, const PrimalSolution& sol, int k) {
  check_solution_shapes(inst, sol);
  if (k < 0 || k >= inst.K) throw DomainError("user index out of range");
  const CVec& h = inst.channels[k];
  const double signal = std::norm(h.dot(sol.beamformers[k]));
  double denom = inst.sigma2[k] + h.dot(sol.Q * h).real();
  for (int j = 0; j < inst.K; ++j) {
    if (j != k) denom += std::norm(h.dot(sol.beamformers[j]));
  }
  return signal / denom;
}

double fronthaul_rate(const ProblemInstance& inst, const PrimalSolution& sol,
                      int m) {
  check_solution_shapes(inst, sol);
  if (m < 0 || m >= inst.M) throw DomainError("relay index out of range");
  const double received = relay_signal_power(sol, m);

  // Generalized Schur complement of Q at coordinate m against the trailing
  // block, with a pseudo-inverse through an eigenvalue cutoff.
  const Eigen::Index tail = inst.M - 1 - m;
  double complement = sol.Q(m, m).real();
  if (tail > 0) {
    const CMat block = sol.Q.bottomRightCorner(tail, tail);
    const CVec coupling = sol.Q.col(m).tail(tail);
    Eigen::SelfAdjointEigenSolver<CMat> es(block);
    const Vec evals = es.eigenvalues();
    const double cutoff = kEigCutoffRel * std::max(evals.cwiseAbs().maxCoeff(), 0.0);
    const CVec rotated = es.eigenvectors().adjoint() * coupling;
    double reduction = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
      if (evals[i] > cutoff && evals[i] > 0.0) {
        reduction += std::norm(rotated[i]) / evals[i];
      }
    }
    complement -= reduction;
  }

  const double floor = kScaleFloor * std::max({received, std::abs(sol.Q(m, m).real()), 1e-300});
  if (complement <= floor) {
    if (received <= floor) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  return std::log2(received / complement);
}

CMat fronthaul_block(const ProblemInstance& inst, const PrimalSolution& sol,
                     int m) {
  check_solution_shapes(inst, sol);
  if (m < 0 || m >= inst.M) throw DomainError("relay index out of range");
  const double eta = std::exp2(inst.cbar[m]);
  const Eigen::Index span = inst.M - m;
  CMat b = CMat::Zero(inst.M, inst.M);
  b.bottomRightCorner(span, span) = eta * sol.Q.bottomRightCorner(span, span);
  b(m, m) -= relay_signal_power(sol, m);
  return b;
}

double fronthaul_psd_margin(const ProblemInstance& inst,
                            const PrimalSolution& sol, int m) {
  return min_eig(fronthaul_block(inst, sol, m));
}

Certification certify(const ProblemInstance& inst, const PrimalSolution& sol,
                      const DualSolution& dual, double tol) {
  check_solution_shapes(inst, sol);
  if (dual.beta.size() != inst.K) throw DomainError("dual beta length mismatch");
  if (static_cast<int>(dual.lambdas.size()) != inst.M) {
    throw DomainError("expected one multiplier matrix per relay");
  }
  const int M = inst.M;
  const int K = inst.K;

  Certification cert;
  cert.tol = tol;

  // SINR constraints hold with equality.
  double sinr_eq = 0.0;
  for (int k = 0; k < K; ++k) {
    const CVec& h = inst.channels[k];
    const double own = std::norm(h.dot(sol.beamformers[k])) / inst.gamma[k];
    double rest = inst.sigma2[k] + h.dot(sol.Q * h).real();
    for (int j = 0; j < K; ++j) {
      if (j != k) rest += std::norm(h.dot(sol.beamformers[j]));
    }
    const double scale = std::max(own + rest, kScaleFloor);
    sinr_eq = std::max(sinr_eq, std::abs(own - rest) / scale);
  }
  cert.residuals["sinr_eq"] = sinr_eq;

  // Fronthaul PSD blocks and their complementary slackness. The scale comes
  // from the block's constituents so tight (near-zero) blocks do not blow up
  // the relative residual.
  double fronthaul_psd = 0.0;
  double compl_fronthaul = 0.0;
  for (int m = 0; m < M; ++m) {
    const CMat b = fronthaul_block(inst, sol, m);
    const double eta = std::exp2(inst.cbar[m]);
    const Eigen::Index span = M - m;
    const double scale = std::max(
        eta * sol.Q.bottomRightCorner(span, span).norm() +
            relay_signal_power(sol, m),
        kScaleFloor);
    fronthaul_psd = std::max(fronthaul_psd, std::max(0.0, -min_eig(b)) / scale);
    const double lam_norm = dual.lambdas[m].norm();
    const double pairing = (dual.lambdas[m].conjugate().cwiseProduct(b)).sum().real();
    compl_fronthaul = std::max(
        compl_fronthaul,
        std::abs(pairing) / std::max(lam_norm * scale, kScaleFloor));
  }
  cert.residuals["fronthaul_psd"] = fronthaul_psd;
  cert.residuals["compl_fronthaul"] = compl_fronthaul;

  // Compression covariance is PSD.
  const double q_scale = std::max(spectral_norm(sol.Q), kScaleFloor);
  cert.residuals["q_psd"] = std::max(0.0, -min_eig(sol.Q)) / q_scale;

  // Dual stationarity: the multiplier-weighted identity assembled from the
  // definition, relative to the uplink covariance magnitude.
  CMat d = CMat::Identity(M, M);
  for (int k = 0; k < K; ++k) {
    d.noalias() += dual.beta[k] * inst.channels[k] * inst.channels[k].adjoint();
  }
  const double gamma_norm = d.norm();
  for (int m = 0; m < M; ++m) {
    const double eta = std::exp2(inst.cbar[m]);
    const Eigen::Index span = M - m;
    d(m, m) += dual.lambdas[m](m, m);
    d.bottomRightCorner(span, span) -=
        eta * dual.lambdas[m].bottomRightCorner(span, span);
  }
  cert.residuals["dual_eq"] = d.norm() / std::max(gamma_norm, kScaleFloor);

  // Complementary slackness of the SINR constraints: each beamformer lies in
  // the null space of its own weighted covariance difference.
  Vec lam_diag(M);
  for (int m = 0; m < M; ++m) lam_diag[m] = dual.lambdas[m](m, m).real();
  double compl_sinr = 0.0;
  for (int k = 0; k < K; ++k) {
    const CVec& v = sol.beamformers[k];
    CMat c = CMat::Identity(M, M);
    c.diagonal() += lam_diag.cast<Complex>();
    for (int j = 0; j < K; ++j) {
      if (j != k) {
        c.noalias() += dual.beta[j] * inst.channels[j] * inst.channels[j].adjoint();
      }
    }
    const double quad_c = v.dot(c * v).real();
    const double quad_h =
        dual.beta[k] / inst.gamma[k] * std::norm(inst.channels[k].dot(v));
    const double scale = std::max(quad_c + quad_h, kScaleFloor);
    compl_sinr = std::max(compl_sinr, std::abs(quad_c - quad_h) / scale);
  }
  cert.residuals["compl_sinr"] = compl_sinr;

  // Objectives and gap.
  cert.primal_objective = total_power(sol);
  cert.dual_objective = dual.beta.dot(inst.sigma2);
  cert.duality_gap_rel = std::abs(cert.primal_objective - cert.dual_objective) /
                         std::max(1.0, cert.dual_objective);
  cert.residuals["duality_gap"] = cert.duality_gap_rel;

  cert.pass = true;
  for (const auto& [name, value] : cert.residuals) {
    if (!(value <= tol)) cert.pass = false;
  }
  return cert;
}

}  // namespace jbc

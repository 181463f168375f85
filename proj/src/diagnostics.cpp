#include "jbc/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include "jbc/dual.hpp"
#include "jbc/primal.hpp"

#include <cmath>

namespace jbc {

double thompson_metric(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DomainError("vector lengths differ");
  if (a.size() == 0) throw DomainError("vectors must be nonempty");
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !(b[i] > 0.0)) {
      throw DomainError("part metric needs strictly positive entries");
    }
    d = std::max(d, std::abs(std::log(a[i] / b[i])));
  }
  return d;
}

double dual_coupling_norm(const ProblemInstance& inst, const Vec& beta) {
  const Vec lam_diag = fronthaul_multiplier_diag(inst, beta);
  double worst = 0.0;
  for (int k = 0; k < inst.K; ++k) {
    CMat c = uplink_covariance_excl(inst, beta, lam_diag, k);
    c -= CMat::Identity(inst.M, inst.M);
    Eigen::SelfAdjointEigenSolver<CMat> es(c, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

double dual_rate_bound(const ProblemInstance& inst, const Vec& beta_star) {
  const double c = dual_coupling_norm(inst, beta_star);
  return c / (1.0 + c);
}

std::pair<double, double> primal_spectral_radii(
    const ProblemInstance& inst, const DualSolution& dual,
    const std::vector<CVec>& directions) {
  PowerMapEvaluator eval(inst, dual, directions);
  const int K = inst.K;
  const Vec constant = eval.map(Vec::Zero(K));
  Eigen::MatrixXd probed(K, K);
  for (int j = 0; j < K; ++j) {
    probed.col(j) = eval.map(Vec::Unit(K, j)) - constant;
  }
  auto radius = [](const Eigen::MatrixXd& g) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(g, false)
        .eigenvalues()
        .cwiseAbs()
        .maxCoeff();
  };

  // Closed-form variant: row k reuses its own compression response for
  // every column.
  Eigen::MatrixXd closed(K, K);
  for (int k = 0; k < K; ++k) {
    const CMat qk = eval.covariance(Vec::Unit(K, k));
    const double own_compression =
        inst.channels[k].dot(qk * inst.channels[k]).real();
    const double own_gain = std::norm(inst.channels[k].dot(directions[k]));
    for (int j = 0; j < K; ++j) {
      const double cross =
          j == k ? 0.0 : std::norm(inst.channels[k].dot(directions[j]));
      closed(k, j) = inst.gamma[k] * (cross + own_compression) / own_gain;
    }
  }
  return {radius(probed), radius(closed)};
}

RateMeasurement measure_dual_rate(const ProblemInstance& inst,
                                  DualIterConfig cfg) {
  cfg.record_iterates = true;
  const DualRun run = solve_dual(inst, cfg);
  return measure_dual_rate(inst, run, cfg);
}

RateMeasurement measure_dual_rate(const ProblemInstance& inst,
                                  const DualRun& run,
                                  const DualIterConfig& cfg) {
  if (run.status != SolveStatus::Optimal) {
    throw Error(std::string("rate measurement needs a convergent dual run, got ") +
                to_string(run.status));
  }
  if (run.iterates.empty()) {
    throw Error("rate measurement needs a run with recorded iterates");
  }

  DualIterConfig tight = cfg;
  tight.record_iterates = false;
  tight.beta0 = run.beta;
  tight.tol = 1e-13;
  const DualRun tight_run = solve_dual(inst, tight);
  if (tight_run.status != SolveStatus::Optimal) {
    throw Error("fixed-point refinement did not converge");
  }

  RateMeasurement out;
  out.beta_star = tight_run.beta;
  out.iterations = run.iterations;
  out.theoretical = dual_rate_bound(inst, out.beta_star);

  std::vector<double> dist;
  dist.reserve(run.iterates.size());
  for (const auto& it : run.iterates) {
    bool positive = it.size() > 0;
    for (Eigen::Index i = 0; i < it.size(); ++i) {
      if (!(it[i] > 0.0)) positive = false;
    }
    if (positive) dist.push_back(thompson_metric(it, out.beta_star));
  }

  std::vector<double> ratios;
  for (size_t i = 0; i + 1 < dist.size(); ++i) {
    if (dist[i] > 0.0 && dist[i + 1] > 0.0) {
      ratios.push_back(dist[i + 1] / dist[i]);
    }
  }
  // Drop the last 3 ratios (roundoff-dominated), average up to 20 before.
  const size_t drop = std::min<size_t>(3, ratios.size());
  const size_t end = ratios.size() - drop;
  const size_t begin = end > 20 ? end - 20 : 0;
  if (begin >= end) {
    out.practical = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sum = 0.0;
  for (size_t i = begin; i < end; ++i) sum += ratios[i];
  out.practical = sum / static_cast<double>(end - begin);
  return out;
}

std::vector<RateRow> rate_table(const Scenario& sc,
                                const std::vector<double>& gamma_db_list,
                                double cbar, const DualIterConfig& cfg) {
  std::vector<RateRow> rows;
  rows.reserve(gamma_db_list.size());
  for (const double gamma_db : gamma_db_list) {
    const ProblemInstance inst = generate_instance(sc, gamma_db, cbar);
    const RateMeasurement m = measure_dual_rate(inst, cfg);
    rows.push_back({gamma_db, m.theoretical, m.practical, m.iterations});
  }
  return rows;
}

}  // namespace jbc

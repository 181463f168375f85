#include "jbc/types.hpp"

#include <sstream>

namespace jbc {

namespace {

Vec db_vector_to_linear(const Vec& db) {
  Vec out(db.size());
  for (Eigen::Index i = 0; i < db.size(); ++i) out[i] = db_to_linear(db[i]);
  return out;
}

Vec linear_vector_to_db(const Vec& lin) {
  Vec out(lin.size());
  for (Eigen::Index i = 0; i < lin.size(); ++i) out[i] = linear_to_db(lin[i]);
  return out;
}

}  // namespace

ProblemInstance ProblemInstance::from_db(std::vector<CVec> channels, Vec sigma2,
                                         Vec gamma_db, Vec cbar) {
  ProblemInstance inst;
  inst.K = static_cast<int>(channels.size());
  inst.M = channels.empty() ? 0 : static_cast<int>(channels.front().size());
  inst.channels = std::move(channels);
  inst.sigma2 = std::move(sigma2);
  inst.gamma_db = std::move(gamma_db);
  inst.gamma = db_vector_to_linear(inst.gamma_db);
  inst.cbar = std::move(cbar);
  inst.validate();
  return inst;
}

ProblemInstance ProblemInstance::from_linear(std::vector<CVec> channels,
                                             Vec sigma2, Vec gamma_linear,
                                             Vec cbar) {
  ProblemInstance inst;
  inst.K = static_cast<int>(channels.size());
  inst.M = channels.empty() ? 0 : static_cast<int>(channels.front().size());
  inst.channels = std::move(channels);
  inst.sigma2 = std::move(sigma2);
  inst.gamma = std::move(gamma_linear);
  inst.gamma_db = linear_vector_to_db(inst.gamma);
  inst.cbar = std::move(cbar);
  inst.validate();
  return inst;
}

void ProblemInstance::validate() const {
  auto fail = [](const std::string& what) { throw ParseError(what); };
  if (M <= 0) fail("instance needs at least one relay");
  if (K <= 0) fail("instance needs at least one user");
  if (static_cast<int>(channels.size()) != K) {
    std::ostringstream os;
    os << "expected " << K << " channel rows, got " << channels.size();
    fail(os.str());
  }
  for (int k = 0; k < K; ++k) {
    if (channels[k].size() != M) {
      std::ostringstream os;
      os << "channel row " << k << " has length " << channels[k].size()
         << ", expected " << M;
      fail(os.str());
    }
    if (channels[k].norm() == 0.0) {
      std::ostringstream os;
      os << "channel row " << k << " is identically zero";
      fail(os.str());
    }
    for (int m = 0; m < M; ++m) {
      if (!std::isfinite(channels[k][m].real()) ||
          !std::isfinite(channels[k][m].imag())) {
        fail("channel entries must be finite");
      }
    }
  }
  auto check_positive = [&](const Vec& v, Eigen::Index n, const char* name) {
    if (v.size() != n) {
      std::ostringstream os;
      os << name << " has length " << v.size() << ", expected " << n;
      fail(os.str());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(v[i]) || v[i] <= 0.0) {
        std::ostringstream os;
        os << name << "[" << i << "] must be positive and finite";
        fail(os.str());
      }
    }
  };
  check_positive(sigma2, K, "sigma2");
  check_positive(gamma, K, "gamma");
  check_positive(cbar, M, "cbar");
  if (gamma_db.size() != K) fail("gamma_db length mismatch");
}

double total_power(const PrimalSolution& sol) {
  double p = 0.0;
  for (const auto& v : sol.beamformers) p += v.squaredNorm();
  p += sol.Q.trace().real();
  return p;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::IterationLimit:
      return "IterationLimit";
  }
  return "IterationLimit";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "Optimal") return SolveStatus::Optimal;
  if (s == "Infeasible") return SolveStatus::Infeasible;
  if (s == "IterationLimit") return SolveStatus::IterationLimit;
  throw ParseError("unknown solve status: " + s);
}

void DualIterConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("dual tol must be positive");
  if (max_iter <= 0) throw DomainError("dual max_iter must be positive");
  if (!(power_cap > 0.0)) throw DomainError("power_cap must be positive");
  for (Eigen::Index i = 0; i < beta0.size(); ++i) {
    if (!(beta0[i] >= 0.0)) throw DomainError("beta0 must be nonnegative");
  }
}

void PrimalIterConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw DomainError("primal tol must be positive");
  if (max_iter <= 0) throw DomainError("primal max_iter must be positive");
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    if (!(p0[i] >= 0.0)) throw DomainError("p0 must be nonnegative");
  }
}

}  // namespace jbc

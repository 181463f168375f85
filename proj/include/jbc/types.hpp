#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace jbc {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, configs, dimensions).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A Schur pivot fell below the numerical floor.
class PivotError : public Error {
 public:
  using Error::Error;
};

// A multiplier vector has a vanishing leading entry, so the compression
// covariance recursion cannot proceed.
class DegenerateDualError : public Error {
 public:
  using Error::Error;
};

// A beam direction is orthogonal to its own channel.
class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

// The probed power map is not a contraction; the linear system has no
// meaningful nonnegative solution.
class NotContractiveError : public Error {
 public:
  using Error::Error;
};

// Invalid argument domain (nonpositive entries where positive required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

// One problem instance: K single-antenna users served by M single-antenna
// relays over a rate-limited fronthaul. Channels are row-per-user. SINR
// targets are kept both as stored dB values (file convention) and as the
// derived linear values used by the algorithms.
struct ProblemInstance {
  int M = 0;
  int K = 0;
  std::vector<CVec> channels;  // K entries, each of length M
  Vec sigma2;                  // K noise powers
  Vec gamma;                   // K SINR targets, linear
  Vec gamma_db;                // K SINR targets as stored in files
  Vec cbar;                    // M fronthaul capacities, bits per use

  static ProblemInstance from_db(std::vector<CVec> channels, Vec sigma2,
                                 Vec gamma_db, Vec cbar);
  static ProblemInstance from_linear(std::vector<CVec> channels, Vec sigma2,
                                     Vec gamma_linear, Vec cbar);

  // Throws ParseError on dimension mismatches or out-of-domain values.
  void validate() const;
};

// Dual variables: one SINR multiplier per user and one rank-one fronthaul
// multiplier per relay. lambda_vectors[m] has zeros below index m and a real
// positive entry at index m; lambdas[m] == lambda_vectors[m] *
// lambda_vectors[m]^H.
struct DualSolution {
  Vec beta;
  std::vector<CMat> lambdas;
  std::vector<CVec> lambda_vectors;
};

struct PrimalSolution {
  std::vector<CVec> beamformers;  // K entries, length M
  CMat Q;                         // M x M compression covariance
  Vec powers;                     // K beam powers
  std::vector<CVec> directions;   // K unit-norm beam directions
};

// Transmit-side objective: sum of beam powers plus compression power.
double total_power(const PrimalSolution& sol);

enum class SolveStatus { Optimal, Infeasible, IterationLimit };

const char* to_string(SolveStatus s);
SolveStatus solve_status_from_string(const std::string& s);

struct DualIterConfig {
  double tol = 1e-10;
  long max_iter = 100000;
  double power_cap = 1e8;
  Vec beta0;                     // empty means all-zero start
  bool fast_eval = false;        // shared-factorization evaluation path
  bool record_iterates = false;  // keep the full iterate history
  void validate() const;
};

struct PrimalIterConfig {
  double tol = 1e-10;
  long max_iter = 100000;
  Vec p0;  // empty means all-zero start
  bool record_iterates = false;
  void validate() const;
};

struct SolveReport {
  SolveStatus status = SolveStatus::IterationLimit;
  long dual_iters = 0;
  long primal_iters = 0;
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double duality_gap_rel = std::numeric_limits<double>::quiet_NaN();
  std::map<std::string, double> kkt_residuals;
  std::vector<double> dual_trace;        // dual objective per iteration
  std::vector<double> primal_trace;      // primal objective per iteration
  std::vector<double> dual_step_trace;   // sup-norm of each dual step
  std::vector<double> primal_step_trace; // sup-norm of each primal step
  double wall_time = 0.0;
  // Convergence-rate diagnostics (NaN when not computed).
  double rate_bound = std::numeric_limits<double>::quiet_NaN();
  double rate_practical = std::numeric_limits<double>::quiet_NaN();
  double rho_probed = std::numeric_limits<double>::quiet_NaN();
  double rho_closed_form = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace jbc

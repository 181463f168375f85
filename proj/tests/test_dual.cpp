#include <doctest.h>

#include "jbc/dual.hpp"
#include "testutil.hpp"

#include <Eigen/Eigenvalues>

using namespace jbc;
using jbctest::dual_at;
using jbctest::scalar_instance;
using jbctest::scenario_instance;
using jbctest::synthetic_instance;

TEST_CASE("uplink covariance basics") {
  SUBCASE("identity at zero multipliers") {
    const ProblemInstance inst = scenario_instance(1, 7, 4);
    const CMat g = uplink_covariance(inst, Vec::Zero(4));
    CHECK((g - CMat::Identity(7, 7)).norm() == 0.0);
  }
  SUBCASE("scalar closed form") {
    const ProblemInstance inst = scalar_instance();
    const CMat g = uplink_covariance(inst, Vec::Constant(1, 2.0));
    CHECK(g(0, 0).real() == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("positive semidefinite shift on random draws") {
    std::mt19937_64 eng(21);
    for (int trial = 0; trial < 40; ++trial) {
      const ProblemInstance inst = synthetic_instance(eng, 4, 3);
      const Vec beta = jbctest::random_nonneg_vec(eng, 3, 5.0);
      const CMat g = uplink_covariance(inst, beta);
      CHECK((g - g.adjoint()).norm() <= 1e-14 * g.norm());
      Eigen::SelfAdjointEigenSolver<CMat> es(g - CMat::Identity(4, 4),
                                             Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
  }
  SUBCASE("rejects negative multipliers") {
    const ProblemInstance inst = scalar_instance();
    CHECK_THROWS_AS(uplink_covariance(inst, Vec::Constant(1, -1.0)),
                    DomainError);
  }
}

TEST_CASE("capacity-weighted complement step") {
  SUBCASE("identity loses one dimension") {
    const CMat out = schur_step(CMat::Identity(2, 2), 2.0);
    REQUIRE(out.rows() == 1);
    CHECK(out(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("hand example") {
    CMat g(2, 2);
    g << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    const CMat out = schur_step(g, 2.0);
    REQUIRE(out.rows() == 1);
    CHECK(out(0, 0).real() == doctest::Approx(1.75).epsilon(1e-15));
  }
  SUBCASE("degenerate pivot is an error") {
    CMat g = CMat::Identity(2, 2);
    g(0, 0) = 0.0;
    CHECK_THROWS_AS(schur_step(g, 2.0), PivotError);
  }
  SUBCASE("homogeneous of degree one") {
    std::mt19937_64 eng(33);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 2 + static_cast<int>(eng() % 4);
      CMat a(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a(r, c) = Complex(normal(eng), normal(eng));
      }
      const CMat g = a * a.adjoint() + CMat::Identity(n, n);
      const double eta = 1.5 + 3.0 * (static_cast<double>(eng() % 1000) / 1000.0);
      const double scale = 0.5 + static_cast<double>(eng() % 1000) / 250.0;
      const CMat left = schur_step(scale * g, eta);
      const CMat right = scale * schur_step(g, eta);
      CHECK((left - right).norm() <= 1e-12 * right.norm());
    }
  }
}

TEST_CASE("fronthaul multiplier recursion") {
  SUBCASE("scalar closed form across beta") {
    const ProblemInstance inst = scalar_instance();
    for (double beta : {0.0, 0.5, 2.0, 10.0}) {
      const auto mult = fronthaul_multipliers(inst, Vec::Constant(1, beta));
      CHECK(mult.diag[0] ==
            doctest::Approx((1.0 + beta) / 3.0).epsilon(1e-15));
      CHECK(mult.vectors[0][0].real() ==
            doctest::Approx(std::sqrt((1.0 + beta) / 3.0)).epsilon(1e-15));
    }
  }
  SUBCASE("two-relay identity case") {
    std::vector<CVec> h(1, CVec::Constant(2, Complex(1.0, 0.0)));
    const ProblemInstance inst = ProblemInstance::from_linear(
        std::move(h), Vec::Ones(1), Vec::Ones(1), Vec::Ones(2));
    const auto mult = fronthaul_multipliers(inst, Vec::Zero(1));
    CMat lam0_expected = CMat::Zero(2, 2);
    lam0_expected(0, 0) = 1.0;
    CMat lam1_expected = CMat::Zero(2, 2);
    lam1_expected(1, 1) = 1.0;
    CHECK((mult.lambdas[0] - lam0_expected).norm() <= 1e-15);
    CHECK((mult.lambdas[1] - lam1_expected).norm() <= 1e-15);
    CHECK(dual_stationarity_residual(inst, Vec::Zero(1), mult.lambdas) <=
          1e-15);
  }
  SUBCASE("structure on random draws") {
    std::mt19937_64 eng(55);
    for (int trial = 0; trial < 60; ++trial) {
      const int M = 1 + static_cast<int>(eng() % 6);
      const int K = 1 + static_cast<int>(eng() % 4);
      const ProblemInstance inst = synthetic_instance(eng, M, K);
      const Vec beta = jbctest::random_nonneg_vec(eng, K, 4.0);
      const auto mult = fronthaul_multipliers(inst, beta);
      const CMat gamma = uplink_covariance(inst, beta);

      for (int m = 0; m < M; ++m) {
        const CMat& lam = mult.lambdas[m];
        const CVec& vec = mult.vectors[m];
        // Vanishes outside the trailing block; real positive pivot entry.
        for (int i = 0; i < m; ++i) {
          CHECK(vec[i] == Complex(0.0, 0.0));
          CHECK(lam.row(i).norm() == 0.0);
          CHECK(lam.col(i).norm() == 0.0);
        }
        CHECK(vec[m].real() > 0.0);
        CHECK(vec[m].imag() == 0.0);
        CHECK(mult.diag[m] > 0.0);
        CHECK(lam(m, m).real() == doctest::Approx(mult.diag[m]).epsilon(1e-14));
        // Rank one and consistent with its factor.
        CHECK((lam - vec * vec.adjoint()).norm() <= 1e-13 * (1.0 + lam.norm()));
        Eigen::SelfAdjointEigenSolver<CMat> es(lam, Eigen::EigenvaluesOnly);
        Vec evals = es.eigenvalues();
        std::sort(evals.data(), evals.data() + evals.size());
        if (M > 1) {
          CHECK(std::abs(evals[M - 2]) <= 1e-10 * std::max(1.0, evals[M - 1]));
        }
      }
      // The recursion certifies itself: stationarity holds to roundoff.
      CHECK(dual_stationarity_residual(inst, beta, mult.lambdas) <=
            1e-12 * gamma.norm());
      // Cheap diagonal path agrees with the full recursion.
      const Vec diag = fronthaul_multiplier_diag(inst, beta);
      CHECK((diag - mult.diag).norm() == 0.0);
    }
  }
  SUBCASE("diagonal grows with beta and stays subhomogeneous") {
    std::mt19937_64 eng(77);
    for (int trial = 0; trial < 40; ++trial) {
      const ProblemInstance inst = synthetic_instance(eng, 4, 3);
      const Vec beta = jbctest::random_positive_vec(eng, 3, 0.1, 4.0);
      const Vec bigger = beta + jbctest::random_nonneg_vec(eng, 3, 2.0);
      const Vec d1 = fronthaul_multiplier_diag(inst, beta);
      const Vec d2 = fronthaul_multiplier_diag(inst, bigger);
      for (int m = 0; m < 4; ++m) CHECK(d2[m] >= d1[m] - 1e-12);
      for (double alpha : {1.1, 2.0, 10.0}) {
        const Vec scaled = fronthaul_multiplier_diag(inst, alpha * beta);
        for (int m = 0; m < 4; ++m) {
          CHECK((alpha * d1[m] - scaled[m]) / (alpha * d1[m]) > 1e-12);
        }
      }
    }
  }
}

TEST_CASE("stationarity residual on arbitrary multipliers") {
  const ProblemInstance inst = scenario_instance(2, 3, 2);
  const std::vector<CMat> zeros(3, CMat::Zero(3, 3));
  CHECK(dual_stationarity_residual(inst, Vec::Zero(2), zeros) ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("dual update map") {
  SUBCASE("scalar closed form") {
    const ProblemInstance inst = scalar_instance();
    const Vec i0 = dual_interference_map(inst, Vec::Zero(1));
    CHECK(i0[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    const Vec i1 = dual_interference_map(inst, i0);
    CHECK(i1[0] == doctest::Approx(16.0 / 9.0).epsilon(1e-14));
  }
  SUBCASE("positivity, monotonicity, strict subhomogeneity") {
    std::mt19937_64 eng(91);
    for (int trial = 0; trial < 50; ++trial) {
      const int M = 1 + static_cast<int>(eng() % 5);
      const int K = 1 + static_cast<int>(eng() % 5);
      const ProblemInstance inst = synthetic_instance(eng, M, K);
      const Vec beta = jbctest::random_nonneg_vec(eng, K, 3.0);
      const Vec val = dual_interference_map(inst, beta);
      for (int k = 0; k < K; ++k) CHECK(val[k] > 1e-12);

      const Vec bigger = beta + jbctest::random_nonneg_vec(eng, K, 2.0);
      const Vec val_bigger = dual_interference_map(inst, bigger);
      for (int k = 0; k < K; ++k) CHECK(val_bigger[k] >= val[k] - 1e-12);

      for (double alpha : {1.1, 2.0, 10.0}) {
        const Vec val_scaled = dual_interference_map(inst, (alpha * beta).eval());
        for (int k = 0; k < K; ++k) {
          CHECK((alpha * val[k] - val_scaled[k]) / (alpha * val[k]) > 1e-12);
        }
      }
    }
  }
  SUBCASE("shared-factorization path agrees with the per-user path") {
    std::mt19937_64 eng(101);
    for (int trial = 0; trial < 50; ++trial) {
      const int M = 1 + static_cast<int>(eng() % 7);
      const int K = 1 + static_cast<int>(eng() % 7);
      const ProblemInstance inst = synthetic_instance(eng, M, K);
      const Vec beta = jbctest::random_nonneg_vec(eng, K, 4.0);
      const Vec plain = dual_interference_map(inst, beta, false);
      const Vec fast = dual_interference_map(inst, beta, true);
      for (int k = 0; k < K; ++k) {
        CHECK(fast[k] == doctest::Approx(plain[k]).epsilon(1e-10));
      }
    }
  }
  SUBCASE("growth-rate bound from the coupling norm") {
    std::mt19937_64 eng(111);
    for (int trial = 0; trial < 30; ++trial) {
      const ProblemInstance inst = synthetic_instance(eng, 4, 3);
      const Vec beta = jbctest::random_positive_vec(eng, 3, 0.05, 3.0);
      const Vec lam_diag = fronthaul_multiplier_diag(inst, beta);
      const Vec base = dual_interference_map(inst, beta);
      for (double alpha : {1.3, 2.0, 5.0}) {
        const Vec scaled = dual_interference_map(inst, (alpha * beta).eval());
        for (int k = 0; k < 3; ++k) {
          CMat c = uplink_covariance_excl(inst, beta, lam_diag, k);
          c -= CMat::Identity(4, 4);
          Eigen::SelfAdjointEigenSolver<CMat> es(c, Eigen::EigenvaluesOnly);
          const double coupling = es.eigenvalues().cwiseAbs().maxCoeff();
          const double bound = (1.0 + alpha * coupling) / (1.0 + coupling);
          CHECK(scaled[k] / base[k] <= bound * (1.0 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("dual solve on the closed-form instance") {
  const ProblemInstance inst = scalar_instance();
  DualIterConfig cfg;
  const DualRun run = solve_dual(inst, cfg);
  REQUIRE(run.status == SolveStatus::Optimal);
  CHECK(run.beta[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(run.objective_trace.back() == doctest::Approx(2.0).epsilon(1e-9));

  // From the zero start the objective climbs strictly.
  for (size_t i = 1; i < run.objective_trace.size(); ++i) {
    CHECK(run.objective_trace[i] > run.objective_trace[i - 1]);
  }
  // Error contraction settles at one third per step.
  const auto& tr = run.objective_trace;
  const double ratio = (2.0 - tr[tr.size() - 2]) / (2.0 - tr[tr.size() - 3]);
  CHECK(ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  // Weak duality: every iterate's objective stays below the optimum.
  for (double v : tr) CHECK(v <= 2.0 + 1e-9);
}

TEST_CASE("dual solve detects divergence through the power cap") {
  const ProblemInstance inst = jbctest::infeasible_scalar_instance();
  DualIterConfig cfg;
  cfg.power_cap = 1e4;
  cfg.max_iter = 2000000;
  const DualRun run = solve_dual(inst, cfg);
  CHECK(run.status == SolveStatus::Infeasible);
  for (size_t i = 1; i < run.objective_trace.size(); ++i) {
    CHECK(run.objective_trace[i] > run.objective_trace[i - 1]);
  }
  // The update gains almost exactly 4 per step on this instance.
  const auto& tr = run.objective_trace;
  CHECK(tr[tr.size() - 1] - tr[tr.size() - 2] ==
        doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("dual solve respects the iteration budget") {
  const ProblemInstance inst = scenario_instance(4, 7, 4);
  DualIterConfig cfg;
  cfg.max_iter = 3;
  const DualRun run = solve_dual(inst, cfg);
  CHECK(run.status == SolveStatus::IterationLimit);
  CHECK(run.iterations == 3);
}

TEST_CASE("recorded iterates align with the trace") {
  const ProblemInstance inst = scalar_instance();
  DualIterConfig cfg;
  cfg.record_iterates = true;
  const DualRun run = solve_dual(inst, cfg);
  REQUIRE(run.status == SolveStatus::Optimal);
  REQUIRE(run.iterates.size() == run.objective_trace.size());
  for (size_t i = 0; i < run.iterates.size(); ++i) {
    CHECK(run.iterates[i].dot(inst.sigma2) ==
          doctest::Approx(run.objective_trace[i]).epsilon(1e-15));
  }
}

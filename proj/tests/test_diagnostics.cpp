#include <doctest.h>

#include "jbc/diagnostics.hpp"
#include "jbc/primal.hpp"
#include "testutil.hpp"

#include <cmath>

using namespace jbc;
using jbctest::scalar_instance;
using jbctest::SolvedInstance;
using jbctest::solved_scenario;

TEST_CASE("part metric") {
  Vec a(2), b(2);
  a << 1.0, 1.0;
  b << 2.0, 1.0;
  CHECK(thompson_metric(a, a) == 0.0);
  CHECK(thompson_metric(a, b) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(thompson_metric(a, b) == thompson_metric(b, a));
  CHECK(thompson_metric((4.0 * a).eval(), (4.0 * b).eval()) ==
        doctest::Approx(thompson_metric(a, b)).epsilon(1e-15));

  Vec zero(2);
  zero << 1.0, 0.0;
  CHECK_THROWS_AS(thompson_metric(a, zero), DomainError);
  CHECK_THROWS_AS(thompson_metric(a, Vec::Ones(3)), DomainError);
  CHECK_THROWS_AS(thompson_metric(Vec(), Vec()), DomainError);
}

TEST_CASE("dual coupling norm") {
  const ProblemInstance inst = scalar_instance();
  SUBCASE("closed-form values") {
    CHECK(dual_coupling_norm(inst, Vec::Zero(1)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(dual_coupling_norm(inst, Vec::Constant(1, 2.0)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("nondecreasing in the multipliers") {
    std::mt19937_64 eng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const ProblemInstance rnd = jbctest::synthetic_instance(eng, 4, 3);
      const Vec beta = jbctest::random_nonneg_vec(eng, 3, 2.0);
      const Vec step = jbctest::random_nonneg_vec(eng, 3, 2.0);
      CHECK(dual_coupling_norm(rnd, (beta + step).eval()) >=
            dual_coupling_norm(rnd, beta) - 1e-12);
    }
  }
}

TEST_CASE("contraction factor bound") {
  SUBCASE("closed form at the scalar fixed point") {
    const ProblemInstance inst = scalar_instance();
    CHECK(dual_rate_bound(inst, Vec::Constant(1, 2.0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("vanishes as the fronthaul opens up") {
    std::vector<CVec> h(1, CVec::Constant(1, Complex(1.0, 0.0)));
    const ProblemInstance wide = ProblemInstance::from_linear(
        std::move(h), Vec::Ones(1), Vec::Ones(1), Vec::Constant(1, 20.0));
    const DualRun run = solve_dual(wide, DualIterConfig{});
    REQUIRE(run.status == SolveStatus::Optimal);
    CHECK(dual_rate_bound(wide, run.beta) < 1e-5);
  }
  SUBCASE("always below one") {
    for (std::uint64_t seed : {7, 8, 9}) {
      const SolvedInstance s = solved_scenario(seed, 5, 4);
      CHECK(dual_rate_bound(s.inst, s.dual.beta) < 1.0);
    }
  }
}

TEST_CASE("primal contraction spectral radius") {
  SUBCASE("scalar value matches the hand derivation") {
    const ProblemInstance inst = scalar_instance();
    const DualRun run = solve_dual(inst, DualIterConfig{});
    const auto dirs = beam_directions(inst, run.solution);
    const auto [probed, closed] = primal_spectral_radii(inst, run.solution, dirs);
    CHECK(probed == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(closed == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("probed radius predicts the observed error contraction") {
    for (std::uint64_t seed : {31, 32, 33}) {
      const SolvedInstance s = solved_scenario(seed, 4, 3);
      const auto [probed, closed] = primal_spectral_radii(s.inst, s.dual,
                                                          s.directions);
      CHECK(probed < 1.0);
      CHECK(closed < 1.0);

      PrimalIterConfig cfg;
      cfg.record_iterates = true;
      const PrimalRun run = solve_primal(s.inst, s.dual, s.directions, cfg);
      REQUIRE(run.status == SolveStatus::Optimal);
      const Vec pstar = run.p;
      REQUIRE(run.iterates.size() >= 8);
      // Ratio of successive sup-norm errors a few steps before convergence.
      const size_t i = run.iterates.size() - 5;
      const double e1 = (run.iterates[i] - pstar).lpNorm<Eigen::Infinity>();
      const double e2 = (run.iterates[i + 1] - pstar).lpNorm<Eigen::Infinity>();
      CHECK(e2 / e1 == doctest::Approx(probed).epsilon(0.05));
    }
  }
}

TEST_CASE("measured dual convergence factor") {
  SUBCASE("scalar instance contracts at one third") {
    const RateMeasurement rm = measure_dual_rate(scalar_instance(), DualIterConfig{});
    CHECK(rm.practical == doctest::Approx(1.0 / 3.0).epsilon(1e-2));
    CHECK(rm.theoretical == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rm.practical <= rm.theoretical);
    CHECK(rm.beta_star[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rm.iterations > 10);
  }
  SUBCASE("recorded-run overload matches the fresh-run overload") {
    const ProblemInstance inst = jbctest::scenario_instance(41, 4, 3);
    DualIterConfig cfg;
    cfg.record_iterates = true;
    const DualRun run = solve_dual(inst, cfg);
    REQUIRE(run.status == SolveStatus::Optimal);
    const RateMeasurement a = measure_dual_rate(inst, run, cfg);
    const RateMeasurement b = measure_dual_rate(inst, cfg);
    CHECK(a.practical == doctest::Approx(b.practical).epsilon(1e-12));
    CHECK(a.theoretical == doctest::Approx(b.theoretical).epsilon(1e-12));
    CHECK(a.iterations == b.iterations);
  }
  SUBCASE("practical factor stays below the bound on drawn instances") {
    for (std::uint64_t seed : {51, 52, 53, 54}) {
      const ProblemInstance inst = jbctest::scenario_instance(seed, 5, 4);
      const RateMeasurement rm = measure_dual_rate(inst, DualIterConfig{});
      CHECK(rm.practical <= rm.theoretical + 0.01);
      CHECK(rm.practical > 0.0);
      CHECK(rm.theoretical < 1.0);
    }
  }
  SUBCASE("refuses a run without recorded iterates") {
    const ProblemInstance inst = scalar_instance();
    DualIterConfig cfg;
    const DualRun run = solve_dual(inst, cfg);
    CHECK_THROWS_AS(measure_dual_rate(inst, run, cfg), Error);
  }
}

TEST_CASE("rate table rows stay consistent as targets tighten") {
  Scenario sc;
  sc.num_users = 4;
  sc.seed = 61;
  const std::vector<double> gammas{0.0, 2.0, 4.0};
  const std::vector<RateRow> rows = rate_table(sc, gammas, 3.0, DualIterConfig{});
  REQUIRE(rows.size() == 3);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].gamma_db == gammas[i]);
    CHECK(rows[i].practical <= rows[i].theoretical + 0.01);
    CHECK(rows[i].practical > 0.0);
    CHECK(rows[i].iterations > 0);
    // The bound tracks the coupling norm at the fixed point, which grows
    // with the multipliers and hence with the targets. The measured factor
    // follows no such global ordering, so it gets no monotonicity check.
    if (i > 0) CHECK(rows[i].theoretical >= rows[i - 1].theoretical);
  }
}

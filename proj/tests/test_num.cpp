#include "catch_amalgamated.hpp"

#include <random>
#include <sstream>

#include "nubound/nubound.hpp"
#include "oracles.hpp"

using namespace nubound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

InterferenceMapping two_link() {
  return InterferenceMapping::affine(Matrix{{0.0, 0.5}, {0.5, 0.0}}, {1.0, 1.0});
}

NumProblem two_link_problem(double p_bar) {
  return NumProblem{two_link(), MonotoneNorm::linf(2), MonotoneNorm::linf(2), p_bar};
}

struct RandomAffine {
  std::vector<std::vector<double>> rows;
  std::vector<double> b;
  InterferenceMapping mapping;
};

RandomAffine random_affine(std::mt19937_64& gen, std::size_t n, double scale) {
  auto rows = oracle::random_primitive(gen, n, scale);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> b(n);
  for (auto& v : b) v = u(gen);
  return {rows, b, InterferenceMapping::affine(Matrix::from_rows(rows), b)};
}

} // namespace

TEST_CASE("solve_num on the two-link example") {
  const PerformancePoint p1 = solve_num(two_link_problem(1.0));
  CHECK_THAT(p1.power[0], WithinRel(1.0, 1e-12));
  CHECK_THAT(p1.power[1], WithinRel(1.0, 1e-12));
  CHECK_THAT(p1.utility, WithinRel(2.0 / 3.0, 1e-12));
  CHECK_THAT(p1.energy_efficiency, WithinRel(2.0 / 3.0, 1e-12));
  CHECK(p1.regime == Regime::low_power);

  const PerformancePoint p2 = solve_num(two_link_problem(2.0));
  CHECK_THAT(p2.power[0], WithinRel(2.0, 1e-12));
  CHECK_THAT(p2.utility, WithinRel(1.0, 1e-12));
  CHECK_THAT(p2.energy_efficiency, WithinRel(0.5, 1e-12));
  // Exactly at the transition point the regime is still low-power.
  CHECK(p2.regime == Regime::low_power);
  CHECK(solve_num(two_link_problem(2.0000001)).regime == Regime::high_power);
}

TEST_CASE("solve_num matches the bisection oracle for an affine mapping") {
  const std::vector<std::vector<double>> rows{{0.1, 0.3}, {0.2, 0.4}};
  const std::vector<double> b{1.0, 2.0};
  const NumProblem problem{InterferenceMapping::affine(Matrix::from_rows(rows), b), MonotoneNorm::l1(2),
                           MonotoneNorm::linf(2), 10.0};
  const PerformancePoint pt = solve_num(problem);
  const auto ref = oracle::bisect_affine_num(oracle::to_eigen(rows), oracle::to_eigen(b), 1, 10.0);
  CHECK_THAT(pt.utility, WithinRel(ref.c, 1e-9));
  CHECK_THAT(pt.power[0], WithinRel(ref.p(0), 1e-9));
  CHECK_THAT(pt.power[1], WithinRel(ref.p(1), 1e-9));
}

TEST_CASE("solve_num falls back to a shifted iteration when the plain one oscillates") {
  // Eigenvalues of A are +-0.2; far above the transition point the plain
  // iteration contracts only through the offset and stalls.
  const std::vector<std::vector<double>> rows{{0.0, 0.2}, {0.2, 0.0}};
  const std::vector<double> b{1.0, 2.0};
  const NumProblem problem{InterferenceMapping::affine(Matrix::from_rows(rows), b), MonotoneNorm::l1(2),
                           MonotoneNorm::l1(2), 1e6};
  SolverConfig cfg;
  cfg.max_iterations = 2000;
  const PerformancePoint pt = solve_num(problem, cfg);
  CHECK(pt.iterations > cfg.max_iterations);
  const auto ref = oracle::bisect_affine_num(oracle::to_eigen(rows), oracle::to_eigen(b), 1, 1e6);
  CHECK_THAT(pt.utility, WithinRel(ref.c, 1e-9));
  CHECK_THAT(pt.power[0], WithinRel(ref.p(0), 1e-8));
  CHECK_THAT(pt.power[1], WithinRel(ref.p(1), 1e-8));
}

TEST_CASE("lambda_infinity examples") {
  const AsymptoticSolution a = lambda_infinity(two_link(), MonotoneNorm::linf(2));
  CHECK_THAT(a.lambda_inf, WithinRel(0.5, 1e-12));
  CHECK_THAT(a.sup_utility, WithinRel(2.0, 1e-12));
  CHECK_THAT(a.transition_point, WithinRel(2.0, 1e-12));
  CHECK_FALSE(a.assumption_violated);
  CHECK(a.provenance == AsymptoticProvenance::analytic_affine);

  const auto constant = InterferenceMapping::affine(Matrix(2, 2, 0.0), {2.0, 1.0});
  const AsymptoticSolution c = lambda_infinity(constant, MonotoneNorm::linf(2));
  CHECK(c.assumption_violated);
  CHECK(c.lambda_inf == 0.0);
  CHECK(std::isinf(c.sup_utility));
  CHECK(std::isinf(c.transition_point));
  CHECK_THROWS_AS(utility_bound(constant, MonotoneNorm::linf(2), c.lambda_inf, 1.0), UnboundedUtilityError);
  CHECK_THROWS_AS(ee_bound(constant, MonotoneNorm::linf(2), MonotoneNorm::linf(2), 0.0, 1.0), UnboundedUtilityError);
  // The constant mapping is still solvable at any budget.
  const PerformancePoint pt = solve_num(NumProblem{constant, MonotoneNorm::linf(2), MonotoneNorm::linf(2), 4.0});
  CHECK_THAT(pt.utility, WithinRel(2.0, 1e-12));
  CHECK(pt.regime == Regime::low_power);

  std::mt19937_64 gen(3);
  const auto r = random_affine(gen, 3, 1.0);
  const AsymptoticSolution s = lambda_infinity(r.mapping, MonotoneNorm::l1(3));
  CHECK_THAT(s.lambda_inf, WithinRel(oracle::spectral_radius(oracle::to_eigen(r.rows)), 1e-8));
  CHECK_THAT(MonotoneNorm::l1(3)(s.x_inf), WithinAbs(1.0, 1e-12));
}

TEST_CASE("lambda_infinity flags a reducible linear part with a zero eigenvector coordinate") {
  const auto t = InterferenceMapping::affine(Matrix{{0.5, 0.0}, {0.2, 0.1}}, {1.0, 1.0});
  const AsymptoticSolution s = lambda_infinity(t, MonotoneNorm::linf(2));
  CHECK_FALSE(s.assumption_violated);
  const auto u = InterferenceMapping::affine(Matrix{{0.5, 0.1}, {0.0, 0.1}}, {1.0, 1.0});
  const AsymptoticSolution v = lambda_infinity(u, MonotoneNorm::linf(2));
  CHECK(v.assumption_violated);
  CHECK_THAT(v.lambda_inf, WithinRel(0.5, 1e-9));
}

TEST_CASE("lambda_infinity retries periodic linear parts with a shift") {
  const auto t = InterferenceMapping::affine(Matrix{{0.0, 0.2}, {0.8, 0.0}}, {1.0, 1.0});
  const AsymptoticSolution s = lambda_infinity(t, MonotoneNorm::linf(2));
  CHECK_THAT(s.lambda_inf, WithinRel(0.4, 1e-9));
  CHECK_FALSE(s.warnings.empty());
  CHECK_FALSE(s.assumption_violated);
}

TEST_CASE("lambda_infinity on a numeric-limit mapping") {
  const Matrix a{{0.0, 0.4}, {0.3, 0.0}};
  const auto t = InterferenceMapping::general(2, [a](std::span<const double> p) {
    auto y = a.multiply(p);
    for (auto& v : y) v += 1.0 + std::sqrt(p[0] + p[1]);
    return y;
  });
  const AsymptoticSolution s = lambda_infinity(t, MonotoneNorm::linf(2));
  CHECK(s.provenance == AsymptoticProvenance::numeric_limit);
  CHECK_THAT(s.lambda_inf, WithinRel(std::sqrt(0.12), 1e-5));
}

TEST_CASE("utility_bound and ee_bound examples") {
  const auto t = two_link();
  const MonotoneNorm inf = MonotoneNorm::linf(2);
  CHECK(utility_bound(t, inf, 0.5, 1.0) == 1.0);
  CHECK(utility_bound(t, inf, 0.5, 8.0) == 2.0);
  CHECK(utility_bound(t, inf, 0.5, 2.0) == 2.0);
  CHECK(utility_bound(t, inf, 0.5, std::nextafter(2.0, 3.0)) == 2.0);
  CHECK(ee_bound(t, inf, inf, 0.5, 1.0) == 1.0);
  CHECK(ee_bound(t, inf, inf, 0.5, 4.0) == 0.5);
  CHECK_THAT(solve_num(two_link_problem(4.0)).energy_efficiency, WithinRel(1.0 / 3.0, 1e-12));
}

TEST_CASE("ee_bound with alpha = 2 dominates the measured E on a sweep") {
  const NumProblem problem{two_link(), MonotoneNorm::l1(2), MonotoneNorm::linf(2), 1.0};
  const SweepResult r = sweep(problem, logspace(0.01, 1000.0, 20));
  CHECK(r.alpha == 2.0);
  for (const auto& p : r.points) {
    const double expected = std::min(1.0 / 1.0, 2.0 / (r.asymptotic.lambda_inf * p.p_bar));
    CHECK_THAT(p.ee_bound, WithinRel(expected, 1e-12));
    CHECK(p.energy_efficiency <= p.ee_bound);
    CHECK(p.utility <= p.utility_bound);
  }
}

TEST_CASE("sweep of the two-link example follows the closed form") {
  const SweepResult r = sweep(two_link_problem(1.0), logspace(1e-2, 1e3, 25));
  REQUIRE(r.points.size() == 25);
  for (const auto& p : r.points) CHECK_THAT(p.utility, WithinRel(p.p_bar / (1.0 + 0.5 * p.p_bar), 1e-8));
  for (std::size_t k = 1; k < r.points.size(); ++k) {
    CHECK(r.points[k].utility > r.points[k - 1].utility);
    CHECK(r.points[k].energy_efficiency <= r.points[k - 1].energy_efficiency);
  }
  CHECK(r.points.back().utility >= 1.99);
  CHECK(r.points.front().p_bar == 1e-2);
  CHECK(r.points.back().p_bar == 1e3);
}

TEST_CASE("singleton sweep equals solve_num") {
  const SweepResult r = sweep(two_link_problem(123.0), {1.0});
  REQUIRE(r.points.size() == 1);
  const PerformancePoint direct = solve_num(two_link_problem(1.0));
  CHECK(r.points[0].utility == direct.utility);
  CHECK(r.points[0].power == direct.power);
}

TEST_CASE("E times p_bar lies in the scaling interval at high budgets") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto ra = random_affine(gen, 4, 0.15);
    for (NormKind ka : {NormKind::l1, NormKind::l2, NormKind::linf}) {
      for (NormKind kb : {NormKind::l1, NormKind::linf}) {
        const NumProblem problem{ra.mapping, MonotoneNorm::unit(ka, 4), MonotoneNorm::unit(kb, 4), 1.0};
        const AsymptoticSolution asym = lambda_infinity(problem.mapping, problem.norm_a);
        const double top = std::max(1e3 * asym.transition_point, 100.0);
        const SweepResult r = sweep(problem, logspace(top / 1e3, top, 20));
        const ThetaInterval th = ee_scaling_interval(problem.mapping, problem.norm_a, problem.norm_b,
                                                     r.asymptotic.lambda_inf);
        CHECK(th.lower <= th.upper);
        for (std::size_t k = r.points.size() - 5; k < r.points.size(); ++k) {
          const double ep = r.points[k].energy_efficiency * r.points[k].p_bar;
          CHECK(ep >= th.lower);
          CHECK(ep <= th.upper);
        }
      }
    }
  }
}

TEST_CASE("performance point invariants on random affine mappings") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + std::size_t(trial % 5);
    const auto ra = random_affine(gen, n, 0.1);
    for (NormKind ka : {NormKind::l1, NormKind::l2, NormKind::linf}) {
      const NumProblem problem{ra.mapping, MonotoneNorm::unit(ka, n), MonotoneNorm::l2(n), 1.0};
      const SweepResult r = sweep(problem, logspace(1e-3, 1e4, 15));
      for (const auto& p : r.points) {
        CHECK_THAT(problem.norm_a(p.power), WithinRel(p.p_bar, 1e-8));
        CHECK_THAT(p.energy_efficiency, WithinRel(p.utility / problem.norm_b(p.power), 1e-10));
        CHECK_THAT(p.energy_efficiency, WithinRel(1.0 / problem.norm_b(ra.mapping(p.power)), 1e-8));
        CHECK(p.utility <= p.utility_bound);
        CHECK(p.energy_efficiency <= p.ee_bound);
      }
    }
  }
}

TEST_CASE("sweep results do not depend on the worker count") {
  std::mt19937_64 gen(4);
  const auto ra = random_affine(gen, 6, 0.1);
  const NumProblem problem{ra.mapping, MonotoneNorm::l1(6), MonotoneNorm::l1(6), 1.0};
  const auto grid = logspace(1e-3, 1e3, 40);
  const SweepResult serial = sweep(problem, grid);
  SweepOptions opts;
  opts.jobs = 4;
  const SweepResult parallel = sweep(problem, grid, {}, opts);
  std::ostringstream a, b;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  CHECK(a.str() == b.str());

  SweepOptions warm;
  warm.warm_start = true;
  const SweepResult w = sweep(problem, grid, {}, warm);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK_THAT(w.points[k].utility, WithinRel(serial.points[k].utility, 1e-8));
  CHECK(w.points.back().iterations <= serial.points.back().iterations);
}

TEST_CASE("sweep input validation and failure reporting") {
  const NumProblem problem = two_link_problem(1.0);
  CHECK_THROWS_AS(sweep(problem, {}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(problem, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(problem, {2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(problem, {-1.0}), std::invalid_argument);

  // The linear part is symmetric, so lambda_inf converges at once from the
  // all-ones start. At a tiny budget the offset dominates and the solve
  // converges in two steps; at a large one neither the plain nor the
  // shifted retry gets there within 3.
  const NumProblem hard{InterferenceMapping::affine(Matrix{{0.0, 0.5}, {0.5, 0.0}}, {1.0, 2.0}),
                        MonotoneNorm::l1(2), MonotoneNorm::l1(2), 1.0};
  SolverConfig cfg;
  cfg.max_iterations = 3;
  try {
    sweep(hard, {1e-12, 1e3}, cfg);
    FAIL("expected SweepError");
  } catch (const SweepError& e) {
    CHECK(e.partial().points.size() == 1);
    CHECK(e.partial().points[0].p_bar == 1e-12);
    CHECK_THAT(e.partial().asymptotic.lambda_inf, WithinRel(0.5, 1e-12));
    CHECK(std::string(e.what()).find("p_bar=1000") != std::string::npos);
  }
}

TEST_CASE("monotonicity_violations reports each broken property") {
  PerformancePoint a, b;
  a.p_bar = 1.0;
  b.p_bar = 2.0;
  a.utility = 1.0;
  b.utility = 0.5;
  a.power = NonnegVector({1.0, 1.0});
  b.power = NonnegVector({0.5, 2.0});
  a.energy_efficiency = 1.0;
  b.energy_efficiency = 2.0;
  const auto v = monotonicity_violations({a, b}, 1e-10);
  CHECK(v.size() == 3);
  CHECK(monotonicity_violations({a, a}, 1e-10).empty());
}

TEST_CASE("sweep CSV layout") {
  const SweepResult r = sweep(two_link_problem(1.0), {1.0, 4.0});
  std::ostringstream os;
  write_sweep_csv(os, r);
  const std::string csv = os.str();
  CHECK(csv.rfind("# lambda_inf=0.5\n# p_bar_T=2\n# sup_utility=2\n# alpha=1\n"
                  "p_bar,utility,utility_bound,ee,ee_bound,iterations,residual,regime\n",
                  0) == 0);
  CHECK(csv.find(",low-power\n") != std::string::npos);
  CHECK(csv.find(",high-power\n") != std::string::npos);
}

TEST_CASE("logspace endpoints and spacing") {
  const auto g = logspace(0.01, 1000.0, 6);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 1000.0);
  CHECK_THAT(g[2], WithinRel(1.0, 1e-14));
  CHECK(logspace(3.0, 3.0, 1) == std::vector<double>{3.0});
  CHECK_THROWS_AS(logspace(0.0, 1.0, 3), std::invalid_argument);
}

TEST_CASE("NumProblem validation") {
  NumProblem p = two_link_problem(0.0);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = NumProblem{two_link(), MonotoneNorm::linf(3), MonotoneNorm::linf(2), 1.0};
  CHECK_THROWS_AS(p.validate(), DimensionMismatch);
}

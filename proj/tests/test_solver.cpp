#include "catch_amalgamated.hpp"

#include <random>
#include <sstream>

#include "nubound/nubound.hpp"
#include "oracles.hpp"

using namespace nubound;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("conditional eigenpair of the symmetric two-link mapping") {
  const auto t = InterferenceMapping::affine(Matrix{{0.0, 0.5}, {0.5, 0.0}}, {1.0, 1.0});
  const EigenSolution s = solve_conditional_eigen(t, MonotoneNorm::linf(2));
  CHECK_THAT(s.lambda_star, WithinRel(1.5, 1e-12));
  CHECK_THAT(s.x_star[0], WithinRel(1.0, 1e-12));
  CHECK_THAT(s.x_star[1], WithinRel(1.0, 1e-12));
  CHECK(s.residual <= 1e-10);
}

TEST_CASE("constant mapping gives the normalized offset") {
  const auto t = InterferenceMapping::affine(Matrix(2, 2, 0.0), {2.0, 1.0});
  const EigenSolution s = solve_conditional_eigen(t, MonotoneNorm::linf(2));
  CHECK(s.lambda_star == 2.0);
  CHECK(s.x_star == NonnegVector({1.0, 0.5}));
}

TEST_CASE("conditional eigenpair under l1 matches the damped fixed-point oracle") {
  const Matrix a{{0.1, 0.3}, {0.2, 0.4}};
  const std::vector<double> b{1.0, 2.0};
  const auto t = InterferenceMapping::affine(a, b);
  const EigenSolution s = solve_conditional_eigen(t, MonotoneNorm::l1(2));

  const auto ref = oracle::damped_fixed_point_l1(oracle::to_eigen({{0.1, 0.3}, {0.2, 0.4}}), oracle::to_eigen(b));
  REQUIRE(ref.residual <= 1e-12);
  CHECK_THAT(s.lambda_star, WithinRel(ref.lambda, 1e-10));
  CHECK_THAT(s.x_star[0], WithinRel(ref.x(0), 1e-10));
  CHECK_THAT(s.x_star[1], WithinRel(ref.x(1), 1e-10));
  CHECK_THAT(MonotoneNorm::l1(2)(s.x_star), WithinAbs(1.0, 1e-12));
}

TEST_CASE("eigen solution invariants: unit norm and small residual") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 6;
    const auto rows = oracle::random_primitive(gen, n, 0.2);
    std::vector<double> b(n);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (auto& v : b) v = u(gen);
    const auto t = InterferenceMapping::affine(Matrix::from_rows(rows), b);
    for (NormKind k : {NormKind::l1, NormKind::l2, NormKind::linf}) {
      const MonotoneNorm norm = MonotoneNorm::unit(k, n, 3.0);
      const EigenSolution s = solve_conditional_eigen(t, norm);
      CHECK_THAT(norm(s.x_star), WithinAbs(1.0, 1e-12));
      const auto tx = t.evaluate(s.x_star.span());
      double res = 0.0;
      for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(tx[i] - s.lambda_star * s.x_star[i]));
      CHECK(res == s.residual);
      CHECK(s.residual <= 1e-10 * max_abs(tx));
      CHECK(s.x_star.strictly_positive());
    }
  }
}

TEST_CASE("solution does not depend on the starting point") {
  const auto t = InterferenceMapping::affine(Matrix{{0.1, 0.3, 0.0}, {0.2, 0.4, 0.1}, {0.5, 0.0, 0.2}}, {1.0, 2.0, 0.5});
  const MonotoneNorm norm = MonotoneNorm::l2(3);
  const EigenSolution ref = solve_conditional_eigen(t, norm);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> mag(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    SolverConfig cfg;
    std::vector<double> x0(3);
    for (auto& v : x0) v = std::pow(10.0, mag(gen));
    cfg.initial_point = NonnegVector(x0);
    const EigenSolution s = solve_conditional_eigen(t, norm, cfg);
    CHECK(max_abs_diff(s.x_star.span(), ref.x_star.span()) <= 1e-8);
  }
}

TEST_CASE("solver config validation and non-convergence") {
  const auto t = InterferenceMapping::affine(Matrix{{0.1, 0.3}, {0.2, 0.4}}, {1.0, 2.0});
  SolverConfig bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(solve_conditional_eigen(t, MonotoneNorm::l1(2), bad), std::invalid_argument);
  bad = {};
  bad.initial_point = NonnegVector({1.0, 0.0});
  CHECK_THROWS_AS(solve_conditional_eigen(t, MonotoneNorm::l1(2), bad), std::invalid_argument);
  CHECK_THROWS_AS(solve_conditional_eigen(t, MonotoneNorm::l1(3)), DimensionMismatch);

  SolverConfig tight;
  tight.max_iterations = 2;
  tight.initial_point = NonnegVector({1.0, 1e-6});
  try {
    solve_conditional_eigen(t, MonotoneNorm::l1(2), tight);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverFailure::non_convergence);
    CHECK(e.last_iterate().size() == 2);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("homogeneous eigenpairs of linear maps") {
  const EigenSolution s = solve_homogeneous_eigen(Matrix{{0.0, 0.5}, {0.5, 0.0}}, MonotoneNorm::linf(2));
  CHECK_THAT(s.lambda_star, WithinRel(0.5, 1e-12));
  CHECK(s.x_star == NonnegVector({1.0, 1.0}));

  const EigenSolution r = solve_homogeneous_eigen(Matrix{{2.0, 1.0}, {1.0, 2.0}}, MonotoneNorm::linf(2));
  CHECK_THAT(r.lambda_star, WithinRel(3.0, 1e-12));
  CHECK_THAT(r.x_star[0], WithinRel(1.0, 1e-12));
  CHECK_THAT(r.x_star[1], WithinRel(1.0, 1e-12));
}

TEST_CASE("homogeneous eigenpair of the two-term max mapping matches pattern enumeration") {
  const auto ref = oracle::enumerate_max_mapping();
  REQUIRE(ref.has_value());
  auto g = [](std::span<const double> x) {
    return std::vector<double>{std::max(2.0 * x[0], 3.0 * x[1]), std::max(x[0], x[1])};
  };
  const EigenSolution s = solve_homogeneous_eigen(g, 2, MonotoneNorm::linf(2));
  CHECK_THAT(s.lambda_star, WithinRel(ref->lambda, 1e-10));
  CHECK_THAT(s.x_star[0], WithinAbs(ref->x[0], 1e-10));
  CHECK_THAT(s.x_star[1], WithinAbs(ref->x[1], 1e-10));
  // Frozen values from the enumeration: branch (2 x1, x1) is active.
  CHECK_THAT(ref->lambda, WithinRel(2.0, 1e-14));
  CHECK_THAT(ref->x[1], WithinRel(0.5, 1e-14));
}

TEST_CASE("homogeneous solver rejects non-homogeneous maps and degenerate ones") {
  auto affine = [](std::span<const double> x) { return std::vector<double>{x[1] + 1.0, x[0] + 1.0}; };
  CHECK_THROWS_AS(solve_homogeneous_eigen(affine, 2, MonotoneNorm::linf(2)), std::invalid_argument);

  try {
    solve_homogeneous_eigen(Matrix(2, 2, 0.0), MonotoneNorm::linf(2));
    FAIL("expected degenerate mapping");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverFailure::degenerate_mapping);
  }
}

TEST_CASE("periodic linear part cycles without a shift and converges with one") {
  const Matrix a{{0.0, 1.0}, {4.0, 0.0}};
  SolverConfig cfg;
  cfg.max_iterations = 500;
  cfg.record_trace = true;
  try {
    solve_homogeneous_eigen(a, MonotoneNorm::linf(2), cfg);
    FAIL("expected cycling");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverFailure::possibly_non_primitive);
    CHECK(e.trace().size() == 500);
  }
  cfg.shift = 1.0;
  const EigenSolution s = solve_homogeneous_eigen(a, MonotoneNorm::linf(2), cfg);
  CHECK_THAT(s.lambda_star, WithinRel(2.0, 1e-9));
  CHECK(s.warnings.empty());
}

TEST_CASE("primitivity check") {
  CHECK(check_primitivity(Matrix{{0.0, 1.0}, {1.0, 0.0}}).irreducible);
  CHECK_FALSE(check_primitivity(Matrix{{0.0, 1.0}, {1.0, 0.0}}).primitive);
  CHECK(check_primitivity(Matrix{{1.0, 1.0}, {1.0, 0.0}}).primitive);
  CHECK_FALSE(check_primitivity(Matrix{{1.0, 1.0}, {0.0, 1.0}}).irreducible);
  CHECK(check_primitivity(Matrix{{0.5}}).primitive);
  CHECK_FALSE(check_primitivity(Matrix{{0.0}}).primitive);
  // Wielandt matrix: primitive with exponent exactly (n-1)^2 + 1.
  Matrix w(4, 4, 0.0);
  w(0, 1) = w(1, 2) = w(2, 3) = 1.0;
  w(3, 0) = w(3, 1) = 1.0;
  CHECK(check_primitivity(w).primitive);
  const auto warned = solve_homogeneous_eigen(Matrix{{0.0, 1.0}, {1.0, 0.0}}, MonotoneNorm::linf(2));
  CHECK(warned.warnings.size() == 1);
}

TEST_CASE("Perron root of random primitive matrices matches a dense eigensolver") {
  std::mt19937_64 gen(2024);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = 2 + std::size_t(k % 9);
    const auto rows = oracle::random_primitive(gen, n, 1.0);
    const EigenSolution s = solve_homogeneous_eigen(Matrix::from_rows(rows), MonotoneNorm::l1(n));
    CHECK_THAT(s.lambda_star, WithinRel(oracle::spectral_radius(oracle::to_eigen(rows)), 1e-8));
  }
}

TEST_CASE("trace rows and CSV export") {
  const auto t = InterferenceMapping::affine(Matrix{{0.1, 0.3}, {0.2, 0.4}}, {1.0, 2.0});
  SolverConfig cfg;
  cfg.record_trace = true;
  const EigenSolution s = solve_conditional_eigen(t, MonotoneNorm::l1(2), cfg);
  REQUIRE(s.trace.size() == s.iterations);
  CHECK(s.trace.back().residual == s.residual);
  CHECK(s.trace.back().lambda == s.lambda_star);
  std::ostringstream os;
  write_trace_csv(os, s.trace);
  const std::string csv = os.str();
  CHECK(csv.rfind("iteration,lambda_n,displacement,residual\n1,", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == s.trace.size() + 1);
}

#include "catch_amalgamated.hpp"

#include <limits>
#include <random>

#include "fit.hpp"
#include "nubound/nubound.hpp"
#include "oracles.hpp"

using namespace nubound;
using Catch::Matchers::WithinRel;

namespace {

// Seeded scenarios with a finite transition point.
std::vector<NetworkScenario> interference_limited(std::size_t count, std::uint64_t first_seed) {
  std::vector<NetworkScenario> out;
  for (std::uint64_t seed = first_seed; out.size() < count; ++seed) {
    ScenarioConfig cfg;
    cfg.num_links = 2 + seed % 9;
    cfg.area_side = 300.0;
    cfg.seed = seed;
    NetworkScenario s = generate_scenario(cfg);
    const double rho = scenario_spectral_radius(s);
    if (rho > 1e-6 && rho < 1.0) out.push_back(std::move(s));
  }
  return out;
}

} // namespace

TEST_CASE("scenario mappings satisfy the interference axioms") {
  for (const auto& s : interference_limited(6, 100)) {
    const AxiomReport rep = validate_interference_axioms(build_mapping(s), 10000, s.seed);
    INFO(rep.summary());
    CHECK(rep.passed);
  }
}

TEST_CASE("eigenvalue error envelope shrinks and residuals decay geometrically") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + std::size_t(trial % 6);
    auto rows = oracle::random_primitive(gen, n, 1.0);
    SolverConfig cfg;
    cfg.record_trace = true;
    cfg.tolerance = 1e-13;
    const EigenSolution s = solve_homogeneous_eigen(Matrix::from_rows(rows), MonotoneNorm::l1(n), cfg);
    const auto& tr = s.trace;
    REQUIRE(tr.size() >= 3);
    // Competing subdominant modes make the per-step error alternate, so the
    // settling check runs on the maximum error over blocks of iterations.
    const double floor = 64 * std::numeric_limits<double>::epsilon() * s.lambda_star;
    const std::size_t block = 8;
    double prev = INFINITY;
    for (std::size_t start = 0; start + block <= tr.size(); start += block) {
      double worst = 0.0;
      for (std::size_t k = start; k < start + block; ++k) worst = std::max(worst, std::abs(tr[k].lambda - s.lambda_star));
      CHECK(worst <= prev + floor);
      prev = worst;
    }

    const std::size_t m = std::min<std::size_t>(50, tr.size());
    std::vector<double> it, lr;
    for (std::size_t k = tr.size() - m; k < tr.size(); ++k) {
      if (tr[k].residual <= 0.0) continue;
      it.push_back(double(tr[k].iteration));
      lr.push_back(std::log10(tr[k].residual));
    }
    if (it.size() < 3) continue;
    CHECK(fit::least_squares(it, lr).slope < 0.0);
  }
}

TEST_CASE("budget is tight and bounds hold on generated scenarios") {
  for (const auto& s : interference_limited(5, 300)) {
    const std::size_t n = s.num_links;
    for (NormKind ka : {NormKind::l1, NormKind::linf}) {
      const NumProblem problem{build_mapping(s), MonotoneNorm::unit(ka, n), MonotoneNorm::l1(n), 1.0};
      const AsymptoticSolution asym = lambda_infinity(problem.mapping, problem.norm_a);
      REQUIRE_FALSE(asym.assumption_violated);
      const double pt = asym.transition_point;
      const SweepResult r = sweep(problem, logspace(pt * 1e-4, pt * 1e3, 29));
      for (const auto& p : r.points) {
        CHECK_THAT(problem.norm_a(p.power), WithinRel(p.p_bar, 1e-8));
        CHECK(p.utility <= p.utility_bound);
        CHECK(p.energy_efficiency <= p.ee_bound);
      }
      const double hi = r.points.back().utility * asym.lambda_inf;
      CHECK(hi >= 0.99);
      CHECK(hi <= 1.0);
      const double lo = r.points.front().energy_efficiency * problem.norm_b(problem.mapping.at_zero());
      CHECK(std::abs(lo - 1.0) <= 1e-2);
    }
  }
}

TEST_CASE("warm start and cold start agree on generated scenarios") {
  for (const auto& s : interference_limited(3, 500)) {
    const std::size_t n = s.num_links;
    const NumProblem problem{build_mapping(s), MonotoneNorm::l2(n), MonotoneNorm::l2(n), 1.0};
    const auto grid = logspace(1e-4, 1e2, 12);
    SweepOptions warm;
    warm.warm_start = true;
    const SweepResult a = sweep(problem, grid);
    const SweepResult b = sweep(problem, grid, {}, warm);
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(max_abs_diff(a.points[k].power.span(), b.points[k].power.span()) <=
            1e-8 * a.points[k].power.max());
  }
}

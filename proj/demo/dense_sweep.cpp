// Random dense deployment: sweep the budget over six decades around the
// transition point and write the CSV to stdout.
#include <cstdlib>
#include <iostream>

#include "nubound/nubound.hpp"

int main(int argc, char** argv) {
  using namespace nubound;

  ScenarioConfig cfg;
  cfg.num_links = argc > 1 ? static_cast<std::size_t>(std::atoi(argv[1])) : 8;
  cfg.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
  const NetworkScenario s = generate_scenario(cfg);

  const std::size_t n = s.num_links;
  NumProblem problem{build_mapping(s), MonotoneNorm::l1(n),
                     MonotoneNorm::l1(n), 1.0};
  const AsymptoticSolution asym = lambda_infinity(problem.mapping, problem.norm_a);
  if (asym.assumption_violated) {
    std::cerr << "deployment has no finite transition point: " << asym.violation << '\n';
    return 2;
  }

  SweepOptions opts;
  opts.jobs = 4;
  const double pt = asym.transition_point;
  const SweepResult r = sweep(problem, logspace(pt * 1e-3, pt * 1e3, 31), {}, opts);
  write_sweep_csv(std::cout, r);
}

// Two symmetric links: solve the utility problem at a few budgets and print
// the achieved utility next to both bounds.
#include <cstdio>

#include "nubound/nubound.hpp"

int main() {
  using namespace nubound;

  NetworkScenario s;
  s.num_links = 2;
  s.gain = Matrix{{1.0, 0.5}, {0.5, 1.0}};
  s.noise_power = {1.0, 1.0};
  s.sinr_targets = {1.0, 1.0};

  NumProblem problem{build_mapping(s), MonotoneNorm::linf(2), MonotoneNorm::linf(2), 1.0};
  const AsymptoticSolution asym = lambda_infinity(problem.mapping, problem.norm_a);
  std::printf("lambda_inf = %.6f, sup U = %.6f, transition budget = %.6f\n", asym.lambda_inf, asym.sup_utility,
              asym.transition_point);

  std::printf("%10s %12s %12s %12s %12s  %s\n", "p_bar", "U", "U bound", "E", "E bound", "regime");
  for (double p : {0.01, 0.1, 1.0, 2.0, 10.0, 100.0, 1000.0}) {
    problem.p_bar = p;
    const PerformancePoint pt = solve_num(problem, asym);
    std::printf("%10g %12.6f %12.6f %12.6f %12.6f  %s\n", p, pt.utility, pt.utility_bound, pt.energy_efficiency,
                pt.ee_bound, std::string(to_string(pt.regime)).c_str());
  }
}

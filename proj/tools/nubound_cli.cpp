// nubound command-line front end: gen, solve, sweep, bounds, validate.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure
// (non-convergence, assumption violated, failed axiom validation).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "nubound/nubound.hpp"

namespace {

using nlohmann::ordered_json;
using namespace nubound;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
  std::string scenario;
  std::string norm_a = "linf";
  std::string norm_b = "linf";
  double tol = 1e-10;
  std::size_t max_iter = 100000;
  std::string out;
};

// Scoped output sink: the --out file when given, stdout otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

void add_norm_flags(CLI::App* cmd, CommonOptions& o) {
  const auto kinds = CLI::IsMember({"l1", "l2", "linf"});
  cmd->add_option("--norm-a", o.norm_a, "Budget norm {l1,l2,linf}")->check(kinds)->capture_default_str();
  cmd->add_option("--norm-b", o.norm_b, "Energy-efficiency norm {l1,l2,linf}")->check(kinds)->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--tol", o.tol, "Relative solver tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--max-iter", o.max_iter, "Iteration cap per solve")->check(CLI::PositiveNumber)->capture_default_str();
}

SolverConfig solver_config(const CommonOptions& o) {
  SolverConfig c;
  c.tolerance = o.tol;
  c.max_iterations = o.max_iter;
  return c;
}

NetworkScenario load(const std::string& path) {
  LoadedScenario loaded = load_scenario(path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(loaded.scenario);
}

NumProblem make_problem(const NetworkScenario& s, const CommonOptions& o, double p_bar) {
  return NumProblem{build_mapping(s), MonotoneNorm::unit(parse_norm_kind(o.norm_a), s.num_links),
                    MonotoneNorm::unit(parse_norm_kind(o.norm_b), s.num_links), p_bar};
}

// JSON has no infinity; unbounded quantities are written as null.
ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json to_json(const PerformancePoint& p) {
  ordered_json j;
  j["p_bar"] = p.p_bar;
  j["utility"] = p.utility;
  j["power"] = p.power.values();
  j["energy_efficiency"] = p.energy_efficiency;
  j["utility_bound"] = p.utility_bound;
  j["ee_bound"] = p.ee_bound;
  j["regime"] = std::string(to_string(p.regime));
  j["iterations"] = p.iterations;
  j["residual"] = p.residual;
  return j;
}

int report_violation(const AsymptoticSolution& a) {
  if (!a.assumption_violated) return kExitOk;
  log(LogLevel::error, "assumption violated: " + a.violation);
  return kExitNumerical;
}

} // namespace

int run(int argc, char** argv) {
  CLI::App app{"Utility and energy-efficiency bounds for max-min network utility problems"};
  app.require_subcommand(1);

  // gen
  ScenarioConfig gen_cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a random scenario document");
  gen->add_option("--links", gen_cfg.num_links, "Number of transmitter-receiver pairs")->capture_default_str();
  gen->add_option("--area", gen_cfg.area_side, "Side of the square area (m)")->capture_default_str();
  gen->add_option("--link-distance", gen_cfg.max_link_distance, "Max transmitter-receiver distance (m)")
      ->capture_default_str();
  gen->add_option("--path-loss-exponent", gen_cfg.path_loss_exponent)->capture_default_str();
  gen->add_option("--reference-loss-db", gen_cfg.reference_loss_db)->capture_default_str();
  gen->add_option("--noise-psd", gen_cfg.noise_psd_dbm_per_hz, "Noise PSD (dBm/Hz)")->capture_default_str();
  gen->add_option("--bandwidth", gen_cfg.bandwidth_hz, "Bandwidth (Hz)")->capture_default_str();
  gen->add_option("--target-sinr-db", gen_cfg.target_sinr_db)->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed)->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  // solve
  CommonOptions solve_opts;
  double pbar = 0.0;
  std::string trace_path;
  auto* solve = app.add_subcommand("solve", "Solve one power budget and print the point as JSON");
  solve->add_option("--scenario", solve_opts.scenario)->required()->check(CLI::ExistingFile);
  solve->add_option("--pbar", pbar, "Power budget")->required()->check(CLI::PositiveNumber);
  add_norm_flags(solve, solve_opts);
  add_solver_flags(solve, solve_opts);
  solve->add_option("--out", solve_opts.out, "Output path (default stdout)");
  solve->add_option("--trace", trace_path, "Write the iteration trace CSV here");

  // sweep
  CommonOptions sweep_opts;
  double pbar_min = 0.0, pbar_max = 0.0;
  std::size_t points = 25;
  SweepOptions sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve a log-spaced budget grid and write CSV");
  sweep_cmd->add_option("--scenario", sweep_opts.scenario)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--pbar-min", pbar_min)->required()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--pbar-max", pbar_max)->required()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--points", points)->check(CLI::PositiveNumber)->capture_default_str();
  add_norm_flags(sweep_cmd, sweep_opts);
  add_solver_flags(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--jobs", sweep_flags.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  sweep_cmd->add_flag("--warm-start", sweep_flags.warm_start, "Seed each solve with the previous power vector");
  sweep_cmd->add_option("--out", sweep_opts.out, "Output path (default stdout)");

  // bounds
  CommonOptions bounds_opts;
  auto* bounds = app.add_subcommand("bounds", "Print lambda_inf, sup U, transition point and alpha as JSON");
  bounds->add_option("--scenario", bounds_opts.scenario)->required()->check(CLI::ExistingFile);
  add_norm_flags(bounds, bounds_opts);
  add_solver_flags(bounds, bounds_opts);
  bounds->add_option("--out", bounds_opts.out, "Output path (default stdout)");

  // validate
  std::string validate_scenario, validate_out;
  std::size_t samples = 10000;
  std::uint64_t validate_seed = 0;
  auto* validate = app.add_subcommand("validate", "Sample the standard interference axioms on a scenario mapping");
  validate->add_option("--scenario", validate_scenario)->required()->check(CLI::ExistingFile);
  validate->add_option("--samples", samples)->check(CLI::PositiveNumber)->capture_default_str();
  validate->add_option("--seed", validate_seed)->capture_default_str();
  validate->add_option("--out", validate_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*sweep_cmd && !(pbar_max >= pbar_min)) {
    std::cerr << "sweep: --pbar-max must be >= --pbar-min\n";
    return kExitUsage;
  }
  if (*sweep_cmd && points > 1 && pbar_max == pbar_min) {
    std::cerr << "sweep: a grid of more than one point needs --pbar-max > --pbar-min\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      const NetworkScenario s = generate_scenario(gen_cfg);
      Output out(gen_out);
      write_scenario(out.stream(), s);
      log(LogLevel::info, "spectral radius of normalized gains: " + format_double(scenario_spectral_radius(s)));
      return kExitOk;
    }

    if (*solve) {
      const NetworkScenario s = load(solve_opts.scenario);
      const NumProblem problem = make_problem(s, solve_opts, pbar);
      SolverConfig cfg = solver_config(solve_opts);
      const AsymptoticSolution asym = lambda_infinity(problem.mapping, problem.norm_a, cfg);
      const PerformancePoint pt = solve_num(problem, asym, cfg);
      Output out(solve_opts.out);
      out.stream() << to_json(pt).dump(2) << '\n';
      if (!trace_path.empty()) {
        cfg.record_trace = true;
        const EigenSolution sol =
            solve_conditional_eigen(problem.mapping, problem.norm_a.scaled(problem.p_bar), cfg);
        std::ofstream tf(trace_path);
        if (!tf) throw std::runtime_error("cannot open '" + trace_path + "' for writing");
        write_trace_csv(tf, sol.trace);
      }
      return report_violation(asym);
    }

    if (*sweep_cmd) {
      const NetworkScenario s = load(sweep_opts.scenario);
      const NumProblem problem = make_problem(s, sweep_opts, pbar_min);
      const SweepResult r =
          sweep(problem, logspace(pbar_min, pbar_max, points), solver_config(sweep_opts), sweep_flags);
      Output out(sweep_opts.out);
      write_sweep_csv(out.stream(), r);
      return report_violation(r.asymptotic);
    }

    if (*bounds) {
      const NetworkScenario s = load(bounds_opts.scenario);
      const NumProblem problem = make_problem(s, bounds_opts, 1.0);
      const AsymptoticSolution a = lambda_infinity(problem.mapping, problem.norm_a, solver_config(bounds_opts));
      ordered_json j;
      j["lambda_inf"] = a.lambda_inf;
      j["sup_utility"] = finite_or_null(a.sup_utility);
      j["p_bar_T"] = finite_or_null(a.transition_point);
      j["alpha"] = norm_equivalence_alpha(problem.norm_a, problem.norm_b);
      j["noise_norm_a"] = a.noise_norm_a;
      j["x_inf"] = a.x_inf.values();
      j["assumption_violated"] = a.assumption_violated;
      if (a.assumption_violated) j["violation"] = a.violation;
      j["iterations"] = a.iterations;
      Output out(bounds_opts.out);
      out.stream() << j.dump(2) << '\n';
      return report_violation(a);
    }

    if (*validate) {
      const NetworkScenario s = load(validate_scenario);
      const AxiomReport rep = validate_interference_axioms(build_mapping(s), samples, validate_seed);
      ordered_json j;
      j["passed"] = rep.passed;
      j["samples"] = rep.samples;
      j["checks"] = rep.checks;
      j["summary"] = rep.summary();
      if (rep.counterexample) {
        const auto& c = *rep.counterexample;
        j["counterexample"] = {{"property", std::string(to_string(c.property))},
                               {"sample", c.sample},
                               {"coordinate", c.coordinate},
                               {"x", c.x},
                               {"alpha", c.alpha}};
      }
      Output out(validate_out);
      out.stream() << j.dump(2) << '\n';
      return rep.passed ? kExitOk : kExitNumerical;
    }
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SweepError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const AsymptoticError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UnboundedUtilityError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int main(int argc, char** argv) { return run(argc, argv); }

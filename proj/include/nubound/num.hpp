#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "nubound/asymptotic.hpp"
#include "nubound/errors.hpp"
#include "nubound/format.hpp"
#include "nubound/log.hpp"
#include "nubound/mapping.hpp"
#include "nubound/norm.hpp"
#include "nubound/solver.hpp"

namespace nubound {

/// maximize c  s.t.  p = c T(p),  ||p||_a <= p_bar,  p >= 0, c > 0.
struct NumProblem {
  InterferenceMapping mapping;
  MonotoneNorm norm_a;
  MonotoneNorm norm_b;
  double p_bar = 1.0;

  void validate() const {
    const std::size_t n = mapping.dimension();
    if (norm_a.dimension() != n) throw DimensionMismatch("NumProblem norm_a", n, norm_a.dimension());
    if (norm_b.dimension() != n) throw DimensionMismatch("NumProblem norm_b", n, norm_b.dimension());
    if (!(p_bar > 0.0) || !std::isfinite(p_bar))
      throw std::invalid_argument("NumProblem: power budget must be positive and finite");
  }
};

enum class Regime { low_power, high_power };

inline std::string_view to_string(Regime r) noexcept {
  return r == Regime::high_power ? "high-power" : "low-power";
}

/**
 * Asymptotic eigenpair (x_inf, lambda_inf) of T_inf under ||.||_a with the
 * quantities derived from it. When lambda_inf vanishes the utility is
 * unbounded: sup_utility and transition_point are +infinity.
 */
struct AsymptoticSolution {
  double lambda_inf = 0.0;
  NonnegVector x_inf;
  double sup_utility = std::numeric_limits<double>::infinity();
  double transition_point = std::numeric_limits<double>::infinity();
  /// ||T(0)||_a
  double noise_norm_a = 0.0;
  bool assumption_violated = false;
  std::string violation;
  AsymptoticProvenance provenance = AsymptoticProvenance::analytic_affine;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<std::string> warnings;
};

struct PerformancePoint {
  double p_bar = 0.0;
  double utility = 0.0;
  NonnegVector power;
  double energy_efficiency = 0.0;
  double utility_bound = 0.0;
  double ee_bound = 0.0;
  Regime regime = Regime::low_power;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// lambda_inf at or below this counts as zero.
inline constexpr double kLambdaZero = 1e-12;
/// Eigenvector coordinates at or below this fraction of the largest count as zero.
inline constexpr double kCoordinateZero = 1e-10;

/**
 * Solves T_inf(x) = lambda x, ||x||_a = 1 and fills sup U = 1/lambda_inf and
 * the transition point ||T(0)||_a / lambda_inf.
 *
 * A vanishing T_inf (no interference) is not an error: the result carries
 * lambda_inf = 0, infinite sup_utility/transition_point and
 * assumption_violated. The same flag is raised, with the values still
 * filled, when the eigenvector has a zero coordinate.
 *
 * If plain iteration cycles, the solve is retried once on T_inf + s I with s
 * the last eigenvalue estimate, which has the same eigenvectors and is
 * primitive whenever T_inf is irreducible.
 */
inline AsymptoticSolution lambda_infinity(const InterferenceMapping& t, const MonotoneNorm& norm_a,
                                          const SolverConfig& cfg = {}, double rel_tol = 1e-8) {
  const std::size_t n = t.dimension();
  if (norm_a.dimension() != n) throw DimensionMismatch("lambda_infinity norm", n, norm_a.dimension());

  const AsymptoticMapping tinf = build_asymptotic_mapping(t, rel_tol);
  AsymptoticSolution out;
  out.provenance = tinf.provenance();
  out.noise_norm_a = norm_a(t.at_zero());

  SolverConfig hc = cfg;
  if (tinf.provenance() == AsymptoticProvenance::numeric_limit) {
    // Numeric limits are accurate to about rel_tol; tighter stopping is noise.
    hc.tolerance = std::max(cfg.tolerance, 1e-8);
    hc.homogeneity_tolerance = std::max(cfg.homogeneity_tolerance, 1e-5);
  }

  auto run = [&](const SolverConfig& c) {
    if (tinf.linear_part() && tinf.provenance() == AsymptoticProvenance::analytic_affine)
      return solve_homogeneous_eigen(*tinf.linear_part(), norm_a, c);
    return solve_homogeneous_eigen(tinf, n, norm_a, c);
  };

  EigenSolution sol;
  try {
    sol = run(hc);
  } catch (const SolverError& e) {
    if (e.kind() == SolverFailure::degenerate_mapping) {
      out.lambda_inf = 0.0;
      std::vector<double> last = e.last_iterate();
      out.x_inf = last.empty() ? NonnegVector::ones(n) : NonnegVector(std::move(last));
      out.assumption_violated = true;
      out.violation = "asymptotic mapping vanishes (lambda_inf = 0): utility is unbounded";
      log(LogLevel::info, out.violation);
      return out;
    }
    if (e.kind() != SolverFailure::possibly_non_primitive || e.last_iterate().empty()) throw;
    const std::vector<double> image = tinf(e.last_iterate());
    const double s = norm_a(image);
    if (!(s > 0.0)) throw;
    out.warnings.emplace_back("plain iteration cycled; retried with shift " + format_double(s));
    log(LogLevel::info, out.warnings.back());
    SolverConfig shifted = hc;
    shifted.shift = s;
    sol = run(shifted);
  }

  out.lambda_inf = sol.lambda_star;
  out.x_inf = sol.x_star;
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  out.warnings.insert(out.warnings.end(), sol.warnings.begin(), sol.warnings.end());

  if (out.lambda_inf <= kLambdaZero) {
    out.assumption_violated = true;
    out.violation = "lambda_inf is zero: utility is unbounded";
    out.lambda_inf = std::max(out.lambda_inf, 0.0);
    return out;
  }
  out.sup_utility = 1.0 / out.lambda_inf;
  out.transition_point = out.noise_norm_a / out.lambda_inf;
  if (out.x_inf.min() <= kCoordinateZero * out.x_inf.max()) {
    out.assumption_violated = true;
    out.violation = "asymptotic eigenvector has a zero coordinate; bounds need not be tight";
    log(LogLevel::info, out.violation);
  }
  return out;
}

/// min{ p_bar / ||T(0)||_a, 1 / lambda_inf }, written as the two-branch rule.
inline double utility_bound(const InterferenceMapping& t, const MonotoneNorm& norm_a, double lambda_inf,
                            double p_bar) {
  if (!(lambda_inf > 0.0)) throw UnboundedUtilityError("utility_bound: lambda_inf must be > 0");
  const double noise = norm_a(t.at_zero());
  return p_bar <= noise / lambda_inf ? p_bar / noise : 1.0 / lambda_inf;
}

/// min{ 1 / ||T(0)||_b, alpha / (lambda_inf p_bar) } with the tightest closed-form alpha.
inline double ee_bound(const InterferenceMapping& t, const MonotoneNorm& norm_a, const MonotoneNorm& norm_b,
                       double lambda_inf, double p_bar) {
  if (!(lambda_inf > 0.0)) throw UnboundedUtilityError("ee_bound: lambda_inf must be > 0");
  const double alpha = norm_equivalence_alpha(norm_a, norm_b);
  return std::min(1.0 / norm_b(t.at_zero()), alpha / (lambda_inf * p_bar));
}

struct ThetaInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/**
 * Interval containing E(p_bar) * p_bar for every p_bar > 1:
 * [1 / ||T(beta 1)||_b, alpha / lambda_inf] with ||x||_inf <= beta ||x||_a
 * and ||x||_a <= alpha ||x||_b.
 */
inline ThetaInterval ee_scaling_interval(const InterferenceMapping& t, const MonotoneNorm& norm_a,
                                         const MonotoneNorm& norm_b, double lambda_inf) {
  if (!(lambda_inf > 0.0)) throw UnboundedUtilityError("ee_scaling_interval: lambda_inf must be > 0");
  ThetaInterval r;
  r.alpha = norm_equivalence_alpha(norm_a, norm_b);
  r.beta = norm_equivalence_alpha(MonotoneNorm::linf(t.dimension()), norm_a);
  r.lower = 1.0 / norm_b(t(NonnegVector::filled(t.dimension(), r.beta)));
  r.upper = r.alpha / lambda_inf;
  return r;
}

/**
 * Solves the utility maximization problem at one budget through the
 * conditional eigenproblem under ||x|| = ||x||_a / p_bar: P = x*, U = 1/lambda*.
 */
inline PerformancePoint solve_num(const NumProblem& problem, const AsymptoticSolution& asym,
                                  const SolverConfig& cfg = {}) {
  problem.validate();
  const InterferenceMapping& t = problem.mapping;
  const MonotoneNorm norm = problem.norm_a.scaled(problem.p_bar);
  EigenSolution sol;
  std::size_t spent = 0;
  try {
    sol = solve_conditional_eigen(t, norm, cfg);
  } catch (const SolverError& e) {
    if (e.kind() != SolverFailure::non_convergence || cfg.shift != 0.0) throw;
    // T + sI is again a standard interference mapping with the same
    // conditional eigenvector, and it does not oscillate.
    SolverConfig shifted = cfg;
    shifted.shift = norm(t.evaluate(e.last_iterate()));
    shifted.initial_point = NonnegVector(e.last_iterate());
    log(LogLevel::info, "p_bar=" + format_double(problem.p_bar) +
                            ": plain iteration did not converge; retrying with shift " +
                            format_double(shifted.shift));
    spent = cfg.max_iterations;
    sol = solve_conditional_eigen(t, norm, shifted);
  }

  PerformancePoint pt;
  pt.p_bar = problem.p_bar;
  pt.utility = 1.0 / sol.lambda_star;
  pt.power = sol.x_star;
  pt.energy_efficiency = pt.utility / problem.norm_b(pt.power);
  pt.iterations = spent + sol.iterations;
  pt.residual = sol.residual;
  if (asym.lambda_inf > 0.0) {
    pt.utility_bound = utility_bound(t, problem.norm_a, asym.lambda_inf, problem.p_bar);
    pt.ee_bound = ee_bound(t, problem.norm_a, problem.norm_b, asym.lambda_inf, problem.p_bar);
  } else {
    // lambda_inf = 0: the high-power branches are +infinity.
    pt.utility_bound = problem.p_bar / problem.norm_a(t.at_zero());
    pt.ee_bound = 1.0 / problem.norm_b(t.at_zero());
  }
  pt.regime = problem.p_bar > asym.transition_point ? Regime::high_power : Regime::low_power;
  return pt;
}

inline PerformancePoint solve_num(const NumProblem& problem, const SolverConfig& cfg = {}) {
  problem.validate();
  return solve_num(problem, lambda_infinity(problem.mapping, problem.norm_a, cfg), cfg);
}

struct SweepOptions {
  std::size_t jobs = 1;
  /// Seed each solve with the previous budget's power vector (forces jobs = 1).
  bool warm_start = false;
  /// Relative slack for the post-sweep monotonicity assertions.
  double monotonicity_slack = 1e-10;
};

struct SweepResult {
  AsymptoticSolution asymptotic;
  /// Equivalence constant ||x||_a <= alpha ||x||_b used by the E bound.
  double alpha = 0.0;
  std::vector<PerformancePoint> points;
};

class SweepError : public std::runtime_error {
public:
  SweepError(const std::string& what, SweepResult partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const SweepResult& partial() const noexcept { return partial_; }

private:
  SweepResult partial_;
};

/// n points in geometric progression from lo to hi (both included).
inline std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("logspace: need 0 < lo <= hi");
  if (n == 0) throw std::invalid_argument("logspace: need at least one point");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k)
    g[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

/// Descriptions of every monotonicity violation in a solved sweep.
inline std::vector<std::string> monotonicity_violations(const std::vector<PerformancePoint>& pts,
                                                        double slack) {
  std::vector<std::string> out;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const auto& a = pts[k - 1];
    const auto& b = pts[k];
    if (b.utility < a.utility * (1.0 - slack))
      out.push_back("utility decreased between p_bar=" + format_double(a.p_bar) + " and " + format_double(b.p_bar));
    for (std::size_t i = 0; i < a.power.size(); ++i)
      if (b.power[i] < a.power[i] * (1.0 - slack))
        out.push_back("power[" + std::to_string(i) + "] decreased between p_bar=" + format_double(a.p_bar) +
                      " and " + format_double(b.p_bar));
    if (b.energy_efficiency > a.energy_efficiency * (1.0 + slack))
      out.push_back("energy efficiency increased between p_bar=" + format_double(a.p_bar) + " and " +
                    format_double(b.p_bar));
  }
  return out;
}

/**
 * Solves one point per budget of a strictly increasing grid. The budget of
 * the template problem is ignored. Points are independent unless warm start
 * is requested, so they may be solved on `jobs` threads; results are always
 * in grid order.
 *
 * Throws SweepError with the solved prefix if a point fails, and with the
 * full result if U, P or E break monotonicity beyond the slack.
 */
inline SweepResult sweep(const NumProblem& problem, const std::vector<double>& grid,
                         const SolverConfig& cfg = {}, const SweepOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty budget grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k]))
      throw std::invalid_argument("sweep: budgets must be positive and finite");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("sweep: grid must be strictly increasing");
  }
  NumProblem base = problem;
  base.p_bar = grid.front();
  base.validate();

  SweepResult result;
  result.asymptotic = lambda_infinity(base.mapping, base.norm_a, cfg);
  result.alpha = norm_equivalence_alpha(base.norm_a, base.norm_b);

  const std::size_t m = grid.size();
  std::vector<std::optional<PerformancePoint>> solved(m);
  std::vector<std::exception_ptr> errors(m);

  auto solve_at = [&](std::size_t k, const SolverConfig& c) {
    NumProblem p = base;
    p.p_bar = grid[k];
    try {
      solved[k] = solve_num(p, result.asymptotic, c);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (opts.warm_start) {
    SolverConfig c = cfg;
    for (std::size_t k = 0; k < m; ++k) {
      solve_at(k, c);
      if (errors[k]) break;
      c.initial_point = solved[k]->power;
    }
  } else {
    const std::size_t workers = std::max<std::size_t>(1, std::min(opts.jobs, m));
    if (workers == 1) {
      for (std::size_t k = 0; k < m; ++k) {
        solve_at(k, cfg);
        if (errors[k]) break;
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t k = next++; k < m; k = next++) solve_at(k, cfg);
        });
      for (auto& th : pool) th.join();
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (errors[k] || !solved[k]) {
      std::string what = "sweep failed at p_bar=" + format_double(grid[k]);
      try {
        if (errors[k]) std::rethrow_exception(errors[k]);
      } catch (const std::exception& e) {
        what += ": ";
        what += e.what();
      }
      throw SweepError(what, std::move(result));
    }
    result.points.push_back(std::move(*solved[k]));
  }

  const auto violations = monotonicity_violations(result.points, opts.monotonicity_slack);
  if (!violations.empty()) throw SweepError("sweep monotonicity check failed: " + violations.front(), std::move(result));
  return result;
}

/**
 * CSV: header comments (lambda_inf, p_bar_T, sup_utility, alpha) then
 * p_bar,utility,utility_bound,ee,ee_bound,iterations,residual,regime.
 */
inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "# lambda_inf=" << format_double(r.asymptotic.lambda_inf) << '\n';
  os << "# p_bar_T=" << format_double(r.asymptotic.transition_point) << '\n';
  os << "# sup_utility=" << format_double(r.asymptotic.sup_utility) << '\n';
  os << "# alpha=" << format_double(r.alpha) << '\n';
  os << "p_bar,utility,utility_bound,ee,ee_bound,iterations,residual,regime\n";
  for (const auto& p : r.points) {
    os << format_double(p.p_bar) << ',' << format_double(p.utility) << ',' << format_double(p.utility_bound) << ','
       << format_double(p.energy_efficiency) << ',' << format_double(p.ee_bound) << ',' << p.iterations << ','
       << format_double(p.residual) << ',' << to_string(p.regime) << '\n';
  }
}

} // namespace nubound

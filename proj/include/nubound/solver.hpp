#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nubound/log.hpp"
#include "nubound/mapping.hpp"
#include "nubound/norm.hpp"
#include "nubound/random.hpp"
#include "nubound/vector.hpp"

namespace nubound {

struct SolverConfig {
  /// Relative stopping tolerance for both iterate displacement and residual.
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
  /// Strictly positive start; all-ones when empty. Normalized before use.
  std::optional<NonnegVector> initial_point;
  bool record_trace = false;
  /// Homogeneous solves only: sampled check of T(2x) = 2 T(x).
  double homogeneity_tolerance = 1e-8;
  /// Iterate x -> T(x) + shift * x instead of T. Same eigenvectors, with the
  /// eigenvalue shifted by `shift`; damps the oscillation of periodic or
  /// nearly periodic mappings. Reported lambda values have the shift removed.
  double shift = 0.0;

  void validate(std::size_t n) const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("SolverConfig: tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
    if (!(shift >= 0.0) || !std::isfinite(shift))
      throw std::invalid_argument("SolverConfig: shift must be finite and >= 0");
    if (initial_point) {
      if (initial_point->size() != n) throw DimensionMismatch("SolverConfig initial point", n, initial_point->size());
      if (!initial_point->strictly_positive())
        throw std::invalid_argument("SolverConfig: initial point must be strictly positive");
    }
  }
};

struct TraceRow {
  std::size_t iteration;
  double lambda;
  double displacement;
  double residual;
};

struct EigenSolution {
  NonnegVector x_star;
  double lambda_star = 0.0;
  std::size_t iterations = 0;
  /// ||T(x*) - lambda* x*||_inf
  double residual = 0.0;
  std::vector<TraceRow> trace;
  std::vector<std::string> warnings;
};

enum class SolverFailure { non_convergence, possibly_non_primitive, degenerate_mapping };

/// Carries the last iterate so callers can inspect a failed solve.
class SolverError : public std::runtime_error {
public:
  SolverError(SolverFailure kind, const std::string& what, std::vector<double> last_iterate,
              double residual, std::vector<TraceRow> trace)
      : std::runtime_error(what), kind_(kind), last_(std::move(last_iterate)), residual_(residual),
        trace_(std::move(trace)) {}

  SolverFailure kind() const noexcept { return kind_; }
  const std::vector<double>& last_iterate() const noexcept { return last_; }
  double residual() const noexcept { return residual_; }
  const std::vector<TraceRow>& trace() const noexcept { return trace_; }

private:
  SolverFailure kind_;
  std::vector<double> last_;
  double residual_;
  std::vector<TraceRow> trace_;
};

struct PrimitivityReport {
  bool irreducible = false;
  bool primitive = false;
};

namespace detail {

using BoolMatrix = std::vector<std::vector<char>>;

inline BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix c(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j) c[i][j] |= b[k][j];
  return c;
}

inline bool all_true(const BoolMatrix& m) {
  for (const auto& r : m)
    for (char v : r)
      if (!v) return false;
  return true;
}

} // namespace detail

/**
 * Irreducibility and primitivity of the zero pattern of a square nonnegative
 * matrix. Irreducible iff (I + A)^(N-1) > 0; primitive iff A^w > 0 for the
 * Wielandt exponent w = N^2 - 2N + 2.
 */
inline PrimitivityReport check_primitivity(const Matrix& a) {
  if (!a.square()) throw DimensionMismatch("check_primitivity", a.rows(), a.cols());
  const std::size_t n = a.rows();
  detail::BoolMatrix pattern(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pattern[i][j] = a(i, j) > 0.0;

  PrimitivityReport r;
  if (n == 1) {
    r.irreducible = true;
    r.primitive = pattern[0][0] != 0;
    return r;
  }

  detail::BoolMatrix reach = pattern;
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
  for (std::size_t power = 1; power < n - 1; power *= 2) reach = detail::bool_multiply(reach, reach);
  r.irreducible = detail::all_true(reach);

  std::size_t w = n * n - 2 * n + 2;
  detail::BoolMatrix result;
  detail::BoolMatrix base = pattern;
  bool have = false;
  while (w > 0) {
    if (w & 1u) {
      result = have ? detail::bool_multiply(result, base) : base;
      have = true;
    }
    w >>= 1u;
    if (w > 0) base = detail::bool_multiply(base, base);
  }
  r.primitive = detail::all_true(result);
  return r;
}

namespace detail {

enum class IterationMode { conditional, homogeneous };

// Normalized fixed-point iteration x <- F(x) / ||F(x)||.
// Stops when ||x_{n+1} - x_n||_inf <= tol ||x_{n+1}||_inf and
// ||F(x) - lambda x||_inf <= tol ||F(x)||_inf hold at the same step.
template <class Eval>
EigenSolution normalized_iteration(Eval&& eval, std::size_t n, const MonotoneNorm& norm,
                                   const SolverConfig& cfg, IterationMode mode) {
  if (norm.dimension() != n) throw DimensionMismatch("solver norm", n, norm.dimension());
  cfg.validate(n);
  const double shift = cfg.shift;

  auto apply = [&](const std::vector<double>& x) {
    std::vector<double> y = eval(std::span<const double>(x));
    if (y.size() != n) throw DimensionMismatch("solver evaluator output", n, y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y[i]) || y[i] < 0.0)
        throw SolverError(SolverFailure::degenerate_mapping,
                          "mapping produced a negative or non-finite coordinate", x, NAN, {});
      y[i] += shift * x[i];
    }
    return y;
  };

  std::vector<double> x = cfg.initial_point ? cfg.initial_point->values() : std::vector<double>(n, 1.0);
  {
    const double nx = norm(x);
    for (double& v : x) v /= nx;
  }

  std::vector<TraceRow> trace;
  std::vector<double> y = apply(x);
  double lam = norm(y);
  double residual = INFINITY;

  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw SolverError(SolverFailure::degenerate_mapping,
                        "mapping returned the zero vector (or a non-finite norm) at iteration " +
                            std::to_string(it),
                        x, residual, std::move(trace));
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) next[i] = y[i] / lam;
    std::vector<double> y_next = apply(next);
    const double lam_next = norm(y_next);

    const double displacement = max_abs_diff(next, x);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      residual = std::max(residual, std::abs(y_next[i] - lam_next * next[i]));

    if (cfg.record_trace) trace.push_back({it, lam_next - shift, displacement, residual});

    x = std::move(next);
    y = std::move(y_next);
    lam = lam_next;

    if (displacement <= cfg.tolerance * max_abs(x) && residual <= cfg.tolerance * max_abs(y)) {
      EigenSolution sol;
      sol.x_star = NonnegVector(std::move(x));
      sol.lambda_star = lam - shift;
      sol.iterations = it;
      sol.residual = residual;
      sol.trace = std::move(trace);
      return sol;
    }
  }

  const std::string msg = mode == IterationMode::homogeneous
                              ? "normalized iteration did not converge within " +
                                    std::to_string(cfg.max_iterations) +
                                    " iterations; mapping is possibly non-primitive"
                              : "normalized iteration did not converge within " +
                                    std::to_string(cfg.max_iterations) + " iterations";
  throw SolverError(mode == IterationMode::homogeneous ? SolverFailure::possibly_non_primitive
                                                      : SolverFailure::non_convergence,
                    msg, x, residual, std::move(trace));
}

} // namespace detail

/**
 * Solves T(x) = lambda x, ||x|| = 1 for a standard interference mapping by
 * the normalized iteration x_{n+1} = T(x_n) / ||T(x_n)||.
 *
 * lambda_star is ||T(x_star)||. Throws SolverError(non_convergence) when the
 * stopping rule is not met within cfg.max_iterations.
 */
inline EigenSolution solve_conditional_eigen(const InterferenceMapping& t, const MonotoneNorm& norm,
                                             const SolverConfig& cfg = {}) {
  return detail::normalized_iteration([&t](std::span<const double> x) { return t.evaluate(x); },
                                      t.dimension(), norm, cfg, detail::IterationMode::conditional);
}

/// Sampled check that eval(2x) = 2 eval(x) within `tol` relative to ||eval(x)||_inf.
template <class Eval>
bool looks_positively_homogeneous(Eval&& eval, std::size_t n, double tol, std::uint64_t seed = 0x5eed) {
  Rng rng(seed);
  for (int s = 0; s < 4; ++s) {
    std::vector<double> x(n), x2(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = s == 0 ? 1.0 : rng.log_uniform(1e-3, 1e3);
      x2[i] = 2.0 * x[i];
    }
    const std::vector<double> y = eval(std::span<const double>(x));
    const std::vector<double> y2 = eval(std::span<const double>(x2));
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(y2[i] - 2.0 * y[i]));
    if (diff > tol * max_abs(y)) return false;
  }
  return true;
}

/**
 * Solves T(x) = lambda x, ||x|| = 1 for a positively homogeneous monotone
 * evaluator (an asymptotic mapping, or a linear map x -> A x).
 *
 * Primitivity is not verified up front. Cycling of the normalized iterates
 * surfaces as SolverError(possibly_non_primitive); an all-zero image as
 * SolverError(degenerate_mapping).
 */
template <class Eval>
EigenSolution solve_homogeneous_eigen(Eval&& eval, std::size_t n, const MonotoneNorm& norm,
                                      const SolverConfig& cfg = {}) {
  if (!looks_positively_homogeneous(eval, n, cfg.homogeneity_tolerance))
    throw std::invalid_argument("solve_homogeneous_eigen: evaluator is not positively homogeneous");
  return detail::normalized_iteration(eval, n, norm, cfg, detail::IterationMode::homogeneous);
}

/// Linear case: Perron pair of a nonnegative matrix, with a primitivity warning.
inline EigenSolution solve_homogeneous_eigen(const Matrix& a, const MonotoneNorm& norm,
                                             const SolverConfig& cfg = {}) {
  if (!a.square()) throw DimensionMismatch("solve_homogeneous_eigen", a.rows(), a.cols());
  const PrimitivityReport pr = check_primitivity(a);
  std::vector<std::string> warnings;
  if (!pr.irreducible)
    warnings.emplace_back("linear part is reducible; the Perron pair may not be unique or positive");
  else if (!pr.primitive && cfg.shift == 0.0)
    warnings.emplace_back("linear part is irreducible but periodic; plain iteration may cycle");
  for (const auto& w : warnings) log(LogLevel::info, w);
  EigenSolution sol = solve_homogeneous_eigen(
      [&a](std::span<const double> x) { return a.multiply(x); }, a.rows(), norm, cfg);
  sol.warnings = std::move(warnings);
  return sol;
}

/// CSV export of a solver trace: iteration, lambda_n, displacement, residual.
inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  const auto old = os.precision(17);
  os << "iteration,lambda_n,displacement,residual\n";
  for (const auto& r : trace)
    os << r.iteration << ',' << r.lambda << ',' << r.displacement << ',' << r.residual << '\n';
  os.precision(old);
}

} // namespace nubound

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nubound/mapping.hpp"
#include "nubound/random.hpp"

namespace nubound {

enum class AxiomProperty { scalability, scalability_below_one, monotonicity, positivity };

inline std::string_view to_string(AxiomProperty p) noexcept {
  switch (p) {
    case AxiomProperty::scalability: return "scalability";
    case AxiomProperty::scalability_below_one: return "scalability-below-one";
    case AxiomProperty::monotonicity: return "monotonicity";
    case AxiomProperty::positivity: return "positivity";
  }
  return "unknown";
}

struct AxiomCounterexample {
  AxiomProperty property;
  std::size_t sample = 0;
  std::size_t coordinate = 0;
  std::vector<double> x;
  std::vector<double> x_lower; // second point of a monotonicity pair
  double alpha = 1.0;
  double lhs = 0.0;            // side that should be larger
  double rhs = 0.0;
  std::string message;
};

struct AxiomReport {
  bool passed = true;
  std::size_t samples = 0;
  std::size_t checks = 0;
  std::optional<AxiomCounterexample> counterexample;

  std::string summary() const {
    std::ostringstream os;
    os.precision(17);
    if (passed) {
      os << "pass: " << checks << " checks over " << samples << " samples";
      return os.str();
    }
    const auto& c = *counterexample;
    os << "fail: " << to_string(c.property) << " violated at sample " << c.sample;
    if (!c.message.empty()) {
      os << " (" << c.message << ")";
    } else {
      os << ", coordinate " << c.coordinate << ": " << c.lhs << " <= " << c.rhs;
      if (c.property != AxiomProperty::monotonicity) os << " with alpha=" << c.alpha;
    }
    return os.str();
  }
};

/**
 * Checks the standard-interference axioms of T by random sampling.
 *
 * Each sample draws x with log-uniform coordinates in [1e-6, 1e6], a factor
 * alpha > 1 and a factor in (0, 1), and a lower point x' = x o u with u in
 * [0, 1]^N (some coordinates zeroed). It then requires
 *   alpha T(x) > T(alpha x),   T(beta x) > beta T(x),   T(x) >= T(x')
 * coordinate-wise in floating point. Positivity of T(0) is checked last.
 * The first violation is reported; nothing is thrown for a violation.
 */
inline AxiomReport validate_interference_axioms(const InterferenceMapping& t, std::size_t samples,
                                                std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("validate_interference_axioms: samples must be >= 1");
  const std::size_t n = t.dimension();
  Rng rng(seed);
  AxiomReport report;
  report.samples = samples;

  auto fail = [&](AxiomCounterexample c) {
    report.passed = false;
    report.counterexample = std::move(c);
    return report;
  };

  auto eval = [&](const std::vector<double>& x, std::size_t sample,
                  AxiomProperty during) -> std::optional<std::vector<double>> {
    try {
      return t.evaluate(x);
    } catch (const std::exception& e) {
      AxiomCounterexample c{AxiomProperty::positivity, sample, 0, x, {}, 1.0, 0.0, 0.0,
                            std::string(to_string(during)) + " check: " + e.what()};
      fail(std::move(c));
      return std::nullopt;
    }
  };

  std::vector<double> x(n), lower(n), scaled(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.log_uniform(1e-6, 1e6);
    for (std::size_t i = 0; i < n; ++i) lower[i] = rng.uniform() < 0.1 ? 0.0 : x[i] * rng.uniform();
    const double up = 1.0 + rng.log_uniform(1e-3, 1e3);
    const double down = 1.0 / (1.0 + rng.log_uniform(1e-3, 1e3));

    auto tx = eval(x, s, AxiomProperty::scalability);
    if (!tx) return report;

    for (std::size_t i = 0; i < n; ++i) scaled[i] = up * x[i];
    auto t_up = eval(scaled, s, AxiomProperty::scalability);
    if (!t_up) return report;
    for (std::size_t i = 0; i < n; ++i) {
      ++report.checks;
      const double lhs = up * (*tx)[i];
      if (!(lhs > (*t_up)[i]))
        return fail({AxiomProperty::scalability, s, i, x, {}, up, lhs, (*t_up)[i], {}});
    }

    for (std::size_t i = 0; i < n; ++i) scaled[i] = down * x[i];
    auto t_down = eval(scaled, s, AxiomProperty::scalability_below_one);
    if (!t_down) return report;
    for (std::size_t i = 0; i < n; ++i) {
      ++report.checks;
      const double rhs = down * (*tx)[i];
      if (!((*t_down)[i] > rhs))
        return fail({AxiomProperty::scalability_below_one, s, i, x, {}, down, (*t_down)[i], rhs, {}});
    }

    auto t_lower = eval(lower, s, AxiomProperty::monotonicity);
    if (!t_lower) return report;
    for (std::size_t i = 0; i < n; ++i) {
      ++report.checks;
      if (!((*tx)[i] >= (*t_lower)[i]))
        return fail({AxiomProperty::monotonicity, s, i, x, lower, 1.0, (*tx)[i], (*t_lower)[i], {}});
    }
  }

  ++report.checks;
  if (!eval(std::vector<double>(n, 0.0), samples, AxiomProperty::positivity)) return report;
  return report;
}

} // namespace nubound

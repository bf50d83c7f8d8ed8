#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nubound/mapping.hpp"
#include "nubound/random.hpp"
#include "nubound/vector.hpp"

namespace nubound {

/// Result of estimating lim_{h->inf} f(h x) / h on the doubling schedule.
struct LimitEstimate {
  /// r(h_final); an upper bound on the limit because r is decreasing in h.
  double value = 0.0;
  double h_final = 0.0;
  /// |r(h_final) - r(h_final / 2)|
  double bracket_width = 0.0;
  /// r(1), r(2), r(4), ... as evaluated.
  std::vector<double> ratios;
};

enum class AsymptoticFailure { not_standard, overflow };

class AsymptoticError : public std::runtime_error {
public:
  AsymptoticError(AsymptoticFailure kind, const std::string& what, double last_finite_h)
      : std::runtime_error(what), kind_(kind), last_finite_h_(last_finite_h) {}

  AsymptoticFailure kind() const noexcept { return kind_; }
  double last_finite_h() const noexcept { return last_finite_h_; }

private:
  AsymptoticFailure kind_;
  double last_finite_h_;
};

/// Largest scale factor the estimator evaluates before giving up on convergence.
inline constexpr double kMaxLimitScale = 1e12;

namespace detail {

/**
 * Coordinate-wise limit estimation for a vector map F.
 *
 * Every coordinate follows the same schedule h = 1, 2, 4, ... and stops on
 * its own once the last difference d = r(h/2) - r(h) and the geometric tail
 * estimate d q / (1 - q), q = d / d_prev, are both within
 * rel_tol * max(r(h), 1e-30). The schedule is cut after the first h above
 * kMaxLimitScale. A ratio that increases by more than rounding means the
 * map is not a standard interference mapping.
 */
template <class F>
std::vector<LimitEstimate> estimate_limits(F&& f, std::span<const double> x, std::size_t m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("asymptotic estimate: rel_tol must be > 0");
  for (double v : x)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("asymptotic estimate: input must be nonnegative and finite");

  const std::size_t m_in = x.size();
  std::vector<LimitEstimate> out(m);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) return out;

  std::vector<double> y0 = f(x);
  if (y0.size() != m) throw DimensionMismatch("asymptotic estimate output", m, y0.size());

  std::vector<char> done(m, 0);
  std::vector<double> d_prev(m, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(y0[i]))
      throw AsymptoticError(AsymptoticFailure::overflow, "f(x) is not finite at h = 1", 0.0);
    out[i].value = y0[i];
    out[i].h_final = 1.0;
    out[i].ratios.push_back(y0[i]);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> hx(m_in);
  double h = 1.0;
  std::size_t remaining = m;
  while (remaining > 0) {
    const double h2 = 2.0 * h;
    for (std::size_t j = 0; j < m_in; ++j) hx[j] = h2 * x[j];
    const std::vector<double> y = f(std::span<const double>(hx));
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i]) continue;
      if (!std::isfinite(y[i]))
        throw AsymptoticError(AsymptoticFailure::overflow,
                              "f(h x) overflowed at h = " + std::to_string(h2), h);
      const double r_prev = out[i].value;
      const double r = y[i] / h2;
      out[i].ratios.push_back(r);
      if (r > r_prev + 8.0 * eps * std::abs(r_prev))
        throw AsymptoticError(AsymptoticFailure::not_standard,
                              "ratio f(h x)/h increased from " + std::to_string(r_prev) + " to " +
                                  std::to_string(r) + " at h = " + std::to_string(h2) +
                                  "; not a standard interference function",
                              h);
      const double d = std::max(r_prev - r, 0.0);
      out[i].value = r;
      out[i].h_final = h2;
      out[i].bracket_width = d;

      const double threshold = rel_tol * std::max(r, 1e-30);
      double tail = std::numeric_limits<double>::infinity();
      if (d == 0.0) {
        tail = 0.0;
      } else if (d_prev[i] > 0.0) {
        const double q = d / d_prev[i];
        if (q < 1.0) tail = d * q / (1.0 - q);
      }
      d_prev[i] = d;
      if ((d <= threshold && tail <= threshold) || h2 > kMaxLimitScale) {
        done[i] = 1;
        --remaining;
      }
    }
    h = h2;
  }
  return out;
}

} // namespace detail

/**
 * Estimates the asymptotic value f_inf(x) = lim_{h->inf} f(h x) / h of a
 * scalar standard interference function. Zero input returns 0 directly.
 */
template <class F>
LimitEstimate estimate_asymptotic_value(F&& f, const NonnegVector& x, double rel_tol) {
  auto wrapped = [&f](std::span<const double> v) { return std::vector<double>{f(v)}; };
  return detail::estimate_limits(wrapped, x.span(), 1, rel_tol).front();
}

enum class AsymptoticProvenance { analytic_affine, analytic_homogeneous_part, numeric_limit, override_map };

inline std::string_view to_string(AsymptoticProvenance p) noexcept {
  switch (p) {
    case AsymptoticProvenance::analytic_affine: return "analytic-affine";
    case AsymptoticProvenance::analytic_homogeneous_part: return "analytic-homogeneous-part";
    case AsymptoticProvenance::numeric_limit: return "numeric-limit";
    case AsymptoticProvenance::override_map: return "override";
  }
  return "unknown";
}

/**
 * @brief The asymptotic mapping T_inf of a standard interference mapping.
 *
 * Positively homogeneous and monotone, with possibly zero coordinates.
 * Affine mappings keep their gain matrix so callers can reason about the
 * linear part (Perron theory, primitivity).
 */
class AsymptoticMapping {
public:
  AsymptoticMapping(std::size_t n, VectorMap eval, AsymptoticProvenance provenance,
                    std::optional<Matrix> linear_part = std::nullopt, double rel_tol = 0.0,
                    VectorMap source = {})
      : n_(n), eval_(std::move(eval)), provenance_(provenance), linear_(std::move(linear_part)),
        rel_tol_(rel_tol), source_(std::move(source)) {}

  std::size_t dimension() const noexcept { return n_; }
  AsymptoticProvenance provenance() const noexcept { return provenance_; }
  const std::optional<Matrix>& linear_part() const noexcept { return linear_; }
  /// Tolerance used for numeric-limit estimates (0 for analytic mappings).
  double rel_tol() const noexcept { return rel_tol_; }

  std::vector<double> operator()(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionMismatch("AsymptoticMapping", n_, x.size());
    if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; }))
      return std::vector<double>(n_, 0.0);
    return eval_(x);
  }

  NonnegVector operator()(const NonnegVector& x) const {
    std::vector<double> y = (*this)(x.span());
    for (double& v : y) v = std::max(v, 0.0);
    return NonnegVector(std::move(y));
  }

  /// Full per-coordinate estimates (bracket widths included); numeric-limit only.
  std::vector<LimitEstimate> estimates(const NonnegVector& x) const {
    if (provenance_ != AsymptoticProvenance::numeric_limit || !source_)
      throw std::logic_error("AsymptoticMapping::estimates: mapping is not a numeric limit");
    if (x.size() != n_) throw DimensionMismatch("AsymptoticMapping::estimates", n_, x.size());
    return detail::estimate_limits(source_, x.span(), n_, rel_tol_);
  }

private:
  std::size_t n_;
  VectorMap eval_;
  AsymptoticProvenance provenance_;
  std::optional<Matrix> linear_;
  double rel_tol_;
  VectorMap source_;
};

namespace detail {

inline AsymptoticMapping numeric_asymptotic_mapping(const InterferenceMapping& t, double rel_tol) {
  VectorMap source = [t](std::span<const double> x) { return t.evaluate(x); };
  VectorMap eval = [source, rel_tol, n = t.dimension()](std::span<const double> x) {
    const auto est = estimate_limits(source, x, n, rel_tol);
    std::vector<double> y(est.size());
    for (std::size_t i = 0; i < est.size(); ++i) y[i] = est[i].value;
    return y;
  };
  return AsymptoticMapping(t.dimension(), std::move(eval), AsymptoticProvenance::numeric_limit,
                           std::nullopt, rel_tol, std::move(source));
}

} // namespace detail

/**
 * Builds T_inf for a mapping.
 *
 * affine               -> x -> A x (exact)
 * additive-homogeneous -> the homogeneous part g (exact)
 * general              -> coordinate-wise numeric limits of T(h x) / h
 *
 * An asymptotic override takes precedence after it agrees with the numeric
 * estimate at 5 sampled points within max(1e-4, 100 rel_tol), relative to
 * the sup-norm of the estimate; disagreement throws std::invalid_argument.
 */
inline AsymptoticMapping build_asymptotic_mapping(const InterferenceMapping& t, double rel_tol = 1e-8) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("build_asymptotic_mapping: rel_tol must be > 0");
  const std::size_t n = t.dimension();

  if (const auto& ovr = t.asymptotic_override()) {
    const AsymptoticMapping numeric = detail::numeric_asymptotic_mapping(t, rel_tol);
    const double tol = std::max(1e-4, 100.0 * rel_tol);
    Rng rng(0xa5a5);
    for (int s = 0; s < 5; ++s) {
      std::vector<double> x(n);
      for (double& v : x) v = rng.log_uniform(1e-2, 1e2);
      const std::vector<double> a = (*ovr)(x);
      const std::vector<double> b = numeric(x);
      if (a.size() != n) throw DimensionMismatch("asymptotic override output", n, a.size());
      if (max_abs_diff(a, b) > tol * std::max(max_abs(b), 1e-300))
        throw std::invalid_argument("asymptotic override disagrees with the numeric limit estimate");
    }
    std::optional<Matrix> lin;
    if (const auto* aff = t.as_affine()) lin = aff->gain;
    return AsymptoticMapping(n, *ovr, AsymptoticProvenance::override_map, std::move(lin));
  }

  if (const auto* aff = std::get_if<AffineStructure>(&t.structure())) {
    Matrix gain = aff->gain;
    VectorMap eval = [gain](std::span<const double> x) { return gain.multiply(x); };
    return AsymptoticMapping(n, std::move(eval), AsymptoticProvenance::analytic_affine, gain);
  }
  if (const auto* add = std::get_if<AdditiveHomogeneousStructure>(&t.structure())) {
    return AsymptoticMapping(n, add->homogeneous, AsymptoticProvenance::analytic_homogeneous_part);
  }
  return detail::numeric_asymptotic_mapping(t, rel_tol);
}

} // namespace nubound

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nubound/errors.hpp"
#include "nubound/vector.hpp"

namespace nubound {

enum class NormKind { l1, l2, linf };

inline std::string_view to_string(NormKind k) noexcept {
  switch (k) {
    case NormKind::l1: return "l1";
    case NormKind::l2: return "l2";
    case NormKind::linf: return "linf";
  }
  return "unknown";
}

inline NormKind parse_norm_kind(std::string_view s) {
  if (s == "l1") return NormKind::l1;
  if (s == "l2") return NormKind::l2;
  if (s == "linf") return NormKind::linf;
  throw std::invalid_argument("unknown norm kind '" + std::string(s) + "' (expected l1, l2 or linf)");
}

/**
 * @brief Weighted l1 / l2 / l-infinity norm divided by a positive scale.
 *
 * With weights w and scale s:
 *   l1   : sum_i w_i |x_i| / s
 *   l2   : sqrt(sum_i w_i x_i^2) / s
 *   linf : max_i w_i |x_i| / s
 *
 * Positive weights make every member monotone on the nonnegative orthant.
 * The scale is how a power budget enters: ||x||_a / p_bar is the same norm
 * with scale multiplied by p_bar.
 */
class MonotoneNorm {
public:
  MonotoneNorm(NormKind kind, std::vector<double> weights, double scale = 1.0)
      : kind_(kind), weights_(std::move(weights)), scale_(scale) {
    if (weights_.empty()) throw std::invalid_argument("MonotoneNorm: need at least one weight");
    for (double w : weights_)
      if (!(w > 0.0) || !std::isfinite(w))
        throw std::invalid_argument("MonotoneNorm: weights must be positive and finite");
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
      throw std::invalid_argument("MonotoneNorm: scale must be positive and finite");
  }

  static MonotoneNorm unit(NormKind kind, std::size_t n, double scale = 1.0) {
    return MonotoneNorm(kind, std::vector<double>(n, 1.0), scale);
  }
  static MonotoneNorm l1(std::size_t n) { return unit(NormKind::l1, n); }
  static MonotoneNorm l2(std::size_t n) { return unit(NormKind::l2, n); }
  static MonotoneNorm linf(std::size_t n) { return unit(NormKind::linf, n); }

  NormKind kind() const noexcept { return kind_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double scale() const noexcept { return scale_; }
  std::size_t dimension() const noexcept { return weights_.size(); }

  /// The norm x -> ||x|| / factor.
  MonotoneNorm scaled(double factor) const { return MonotoneNorm(kind_, weights_, scale_ * factor); }

  double operator()(std::span<const double> x) const {
    if (x.size() != weights_.size())
      throw DimensionMismatch("MonotoneNorm", weights_.size(), x.size());
    double acc = 0.0;
    switch (kind_) {
      case NormKind::l1:
        for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * std::abs(x[i]);
        return acc / scale_;
      case NormKind::l2:
        for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * x[i] * x[i];
        return std::sqrt(acc) / scale_;
      case NormKind::linf:
        for (std::size_t i = 0; i < x.size(); ++i) acc = std::max(acc, weights_[i] * std::abs(x[i]));
        return acc / scale_;
    }
    return acc;
  }

  double operator()(const NonnegVector& x) const { return (*this)(x.span()); }

  bool operator==(const MonotoneNorm&) const = default;

private:
  NormKind kind_;
  std::vector<double> weights_;
  double scale_;
};

inline double norm_eval(const MonotoneNorm& norm, const NonnegVector& x) { return norm(x); }

namespace detail {

// Exponent ordering used by the equivalence constants: l1 < l2 < linf.
inline int exponent_rank(NormKind k) {
  switch (k) {
    case NormKind::l1: return 1;
    case NormKind::l2: return 2;
    case NormKind::linf: return 3;
  }
  throw NoClosedFormError("norm kind has no closed-form equivalence constant");
}

// w^(1/p) for the p of the given kind (p = inf means w itself).
inline double weight_root(NormKind k, double w) { return k == NormKind::l2 ? std::sqrt(w) : w; }

// Substituting y_i = c_i x_i with c_i = root_b(v_i) turns ||x||_b into the
// unweighted l_q norm of y and ||x||_a into the unweighted l_p norm of u o y
// with u_i = root_a(w_i) / c_i.
inline std::vector<double> equivalence_profile(const MonotoneNorm& a, const MonotoneNorm& b) {
  if (a.dimension() != b.dimension())
    throw DimensionMismatch("norm_equivalence_alpha", a.dimension(), b.dimension());
  std::vector<double> u(a.dimension());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = weight_root(a.kind(), a.weights()[i]) / weight_root(b.kind(), b.weights()[i]);
  return u;
}

} // namespace detail

/**
 * Smallest alpha with ||x||_a <= alpha * ||x||_b on the nonnegative orthant.
 *
 * When the exponent of a is at least that of b the extreme point is a
 * coordinate vector; otherwise Hoelder gives the l_r norm of the weight
 * profile with 1/r = 1/p - 1/q.
 */
inline double norm_equivalence_alpha(const MonotoneNorm& a, const MonotoneNorm& b) {
  const std::vector<double> u = detail::equivalence_profile(a, b);
  const int p = detail::exponent_rank(a.kind());
  const int q = detail::exponent_rank(b.kind());
  double base = 0.0;
  if (p >= q) {
    base = *std::max_element(u.begin(), u.end());
  } else if (p == 1 && q == 3) {
    for (double v : u) base += v;
  } else if ((p == 1 && q == 2) || (p == 2 && q == 3)) {
    for (double v : u) base += v * v;
    base = std::sqrt(base);
  } else {
    throw NoClosedFormError("no closed-form equivalence constant for " +
                            std::string(to_string(a.kind())) + " vs " +
                            std::string(to_string(b.kind())));
  }
  return base * b.scale() / a.scale();
}

/// A nonnegative vector attaining ||x||_a = alpha * ||x||_b.
inline NonnegVector equivalence_witness(const MonotoneNorm& a, const MonotoneNorm& b) {
  const std::vector<double> u = detail::equivalence_profile(a, b);
  const int p = detail::exponent_rank(a.kind());
  const int q = detail::exponent_rank(b.kind());
  const std::size_t n = u.size();
  std::vector<double> x(n, 0.0);
  auto c = [&](std::size_t i) { return detail::weight_root(b.kind(), b.weights()[i]); };
  if (p >= q) {
    const auto k = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
    x[k] = 1.0;
  } else if (q == 3) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 / c(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] = u[i] / c(i);
  }
  return NonnegVector(std::move(x));
}

} // namespace nubound

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nubound/errors.hpp"
#include "nubound/vector.hpp"

namespace nubound {

/// Vector-valued evaluator on R^N_+. Callers guarantee nonnegative input.
using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

/// T(x) = A x + b with A >= 0 and b > 0.
struct AffineStructure {
  Matrix gain;
  std::vector<double> offset;
};

/// T(x) = g(x) + b with g positively homogeneous, monotone and g(0) = 0.
struct AdditiveHomogeneousStructure {
  VectorMap homogeneous;
  std::vector<double> offset;
};

/// No exploitable structure; only the evaluator is known.
struct GeneralStructure {};

using MappingStructure =
    std::variant<AffineStructure, AdditiveHomogeneousStructure, GeneralStructure>;

/**
 * @brief A standard interference mapping T: R^N_+ -> R^N_++.
 *
 * The evaluator is stored together with a structure tag. The tag is what
 * lets the asymptotic module drop the noise term analytically instead of
 * estimating a limit. An optional asymptotic override supplies T_inf for
 * mappings whose limit the caller already knows.
 *
 * Evaluation through operator() rejects outputs that are not strictly
 * positive and finite. Inputs are NonnegVector, so off-orthant arguments
 * cannot reach the evaluator.
 */
class InterferenceMapping {
public:
  static InterferenceMapping affine(Matrix gain, std::vector<double> offset) {
    const std::size_t n = offset.size();
    if (n == 0) throw std::invalid_argument("affine mapping: empty offset");
    if (gain.rows() != n || gain.cols() != n)
      throw DimensionMismatch("affine mapping: gain matrix", n, gain.rows() != n ? gain.rows() : gain.cols());
    if (!gain.nonnegative())
      throw std::invalid_argument("affine mapping: gain matrix must be entrywise nonnegative");
    check_offset(offset, "affine mapping");
    AffineStructure s{std::move(gain), std::move(offset)};
    VectorMap eval = [s](std::span<const double> x) {
      std::vector<double> y = s.gain.multiply(x);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] += s.offset[i];
      return y;
    };
    return InterferenceMapping(n, std::move(eval), std::move(s));
  }

  static InterferenceMapping additive_homogeneous(VectorMap homogeneous, std::vector<double> offset) {
    const std::size_t n = offset.size();
    if (n == 0) throw std::invalid_argument("additive-homogeneous mapping: empty offset");
    if (!homogeneous) throw std::invalid_argument("additive-homogeneous mapping: empty evaluator");
    check_offset(offset, "additive-homogeneous mapping");
    AdditiveHomogeneousStructure s{std::move(homogeneous), std::move(offset)};
    VectorMap eval = [s, n](std::span<const double> x) {
      std::vector<double> y = s.homogeneous(x);
      if (y.size() != n) throw DimensionMismatch("homogeneous part output", n, y.size());
      for (std::size_t i = 0; i < n; ++i) y[i] += s.offset[i];
      return y;
    };
    return InterferenceMapping(n, std::move(eval), std::move(s));
  }

  static InterferenceMapping general(std::size_t n, VectorMap evaluator) {
    if (n == 0) throw std::invalid_argument("general mapping: dimension must be at least 1");
    if (!evaluator) throw std::invalid_argument("general mapping: empty evaluator");
    return InterferenceMapping(n, std::move(evaluator), GeneralStructure{});
  }

  /// Copy of this mapping whose asymptotic mapping is given explicitly.
  InterferenceMapping with_asymptotic_override(VectorMap t_inf) const {
    if (!t_inf) throw std::invalid_argument("asymptotic override: empty evaluator");
    InterferenceMapping copy(*this);
    copy.override_ = std::move(t_inf);
    return copy;
  }

  std::size_t dimension() const noexcept { return n_; }
  const MappingStructure& structure() const noexcept { return structure_; }
  const std::optional<VectorMap>& asymptotic_override() const noexcept { return override_; }

  bool is_affine() const noexcept { return std::holds_alternative<AffineStructure>(structure_); }
  const AffineStructure* as_affine() const noexcept { return std::get_if<AffineStructure>(&structure_); }

  /// Evaluates T(x); throws std::domain_error when an output is not in R_++.
  NonnegVector operator()(const NonnegVector& x) const { return NonnegVector(evaluate(x.span())); }

  /// Raw evaluation with the positivity check but without wrapping.
  std::vector<double> evaluate(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionMismatch("InterferenceMapping", n_, x.size());
    std::vector<double> y = eval_(x);
    if (y.size() != n_) throw DimensionMismatch("InterferenceMapping output", n_, y.size());
    for (std::size_t i = 0; i < n_; ++i)
      if (!(y[i] > 0.0) || !std::isfinite(y[i]))
        throw std::domain_error("InterferenceMapping: output coordinate " + std::to_string(i) +
                                " is not strictly positive and finite (" + std::to_string(y[i]) + ")");
    return y;
  }

  NonnegVector at_zero() const { return (*this)(NonnegVector::zeros(n_)); }

private:
  InterferenceMapping(std::size_t n, VectorMap eval, MappingStructure s)
      : n_(n), eval_(std::move(eval)), structure_(std::move(s)) {}

  static void check_offset(const std::vector<double>& b, const char* who) {
    for (double v : b)
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(who) + ": offset must be strictly positive");
  }

  std::size_t n_;
  VectorMap eval_;
  MappingStructure structure_;
  std::optional<VectorMap> override_;
};

} // namespace nubound

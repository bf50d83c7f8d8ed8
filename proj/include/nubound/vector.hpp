#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nubound/errors.hpp"

namespace nubound {

/**
 * @brief A point of the nonnegative orthant R^N_+.
 *
 * Construction validates that the vector is non-empty and that every
 * coordinate is finite and nonnegative; the object is immutable afterwards.
 */
class NonnegVector {
public:
  NonnegVector() = default;

  explicit NonnegVector(std::vector<double> values) : values_(std::move(values)) { check(); }

  NonnegVector(std::initializer_list<double> values) : values_(values) { check(); }

  static NonnegVector filled(std::size_t n, double value) {
    return NonnegVector(std::vector<double>(n, value));
  }
  static NonnegVector zeros(std::size_t n) { return filled(n, 0.0); }
  static NonnegVector ones(std::size_t n) { return filled(n, 1.0); }

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> span() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  /// True when every coordinate is strictly positive.
  bool strictly_positive() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
  }

  double max() const { return *std::max_element(values_.begin(), values_.end()); }
  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  NonnegVector scaled(double factor) const {
    if (!(factor >= 0.0) || !std::isfinite(factor))
      throw std::invalid_argument("NonnegVector::scaled: factor must be finite and >= 0");
    std::vector<double> out(values_);
    for (double& v : out) v *= factor;
    return NonnegVector(std::move(out));
  }

  bool operator==(const NonnegVector&) const = default;

private:
  void check() const {
    if (values_.empty())
      throw std::invalid_argument("NonnegVector: dimension must be at least 1");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] < 0.0)
        throw std::invalid_argument("NonnegVector: coordinate " + std::to_string(i) +
                                    " is negative or not finite (" +
                                    std::to_string(values_[i]) + ")");
    }
  }

  std::vector<double> values_;
};

/// Dense row-major matrix of doubles. Only what the library needs.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from nested rows; all rows must have the same length.
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("Matrix: ragged rows", cols_, r.size());
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw DimensionMismatch("Matrix: ragged rows", c, rows[i].size());
      std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  std::vector<double> multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw DimensionMismatch("Matrix::multiply", cols_, x.size());
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      double acc = 0.0;
      const double* a = data_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) acc += a[j] * x[j];
      y[i] = acc;
    }
    return y;
  }

  bool nonnegative() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v) && v >= 0.0; });
  }

  bool operator==(const Matrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// sup-norm of the coordinate-wise difference of two equally sized vectors.
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("max_abs_diff", a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

} // namespace nubound

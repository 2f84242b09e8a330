/**
 * @file dense_tensor.hpp
 * @brief Dense d-way arrays and the basic tensor algebra built on them.
 *
 * Storage follows a single vectorization convention everywhere in the
 * library: the first index runs fastest, so element (i1, ..., id) lives at
 * linear position i1 + i2*k1 + ... + id*k1*...*k(d-1) (0-based). Every
 * reshape (core unfoldings, Kronecker rows, model files) relies on it.
 *
 * Dense tensors are the oracle representation of weight and basis tensors.
 * They grow exponentially with the order, so production paths work on
 * tensor trains instead (see tensor_train.hpp).
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnbs/error.hpp"

namespace tnbs {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

/// d-dimensional real array with explicit shape, first index fastest.
class DenseTensor {
 public:
  DenseTensor() : shape_{1}, values_(1, 0.0) {}

  /// Zero-filled tensor of the given shape.
  explicit DenseTensor(Shape shape) : shape_(std::move(shape)) {
    check_shape();
    values_.assign(shape_size(shape_), 0.0);
  }

  DenseTensor(Shape shape, std::vector<double> values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    check_shape();
    if (values_.size() != shape_size(shape_)) {
      throw DimensionError("tensor of shape " + shape_to_string(shape_) + " needs " +
                           std::to_string(shape_size(shape_)) + " values, got " +
                           std::to_string(values_.size()));
    }
  }

  static DenseTensor from_vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return DenseTensor({n}, std::move(values));
  }

  std::size_t order() const noexcept { return shape_.size(); }
  const Shape& shape() const noexcept { return shape_; }
  std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  std::size_t linear_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) {
      throw DimensionError("index of length " + std::to_string(index.size()) +
                           " for tensor of order " + std::to_string(shape_.size()));
    }
    std::size_t pos = 0;
    std::size_t stride = 1;
    for (std::size_t m = 0; m < shape_.size(); ++m) {
      if (index[m] >= shape_[m]) throw DimensionError("tensor index out of range");
      pos += index[m] * stride;
      stride *= shape_[m];
    }
    return pos;
  }

  double operator()(std::span<const std::size_t> index) const { return values_[linear_index(index)]; }
  double& operator()(std::span<const std::size_t> index) { return values_[linear_index(index)]; }
  double at(std::initializer_list<std::size_t> index) const {
    return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
  }
  double& at(std::initializer_list<std::size_t> index) {
    return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  void check_shape() const {
    if (shape_.empty()) throw DimensionError("tensor order must be at least 1");
    for (std::size_t e : shape_) {
      if (e == 0) throw DimensionError("tensor extents must be positive, got " + shape_to_string(shape_));
    }
  }

  Shape shape_;
  std::vector<double> values_;
};

/// Column vector of all entries in the library-wide vectorization order.
inline std::vector<double> vectorize(const DenseTensor& a) {
  return {a.values().begin(), a.values().end()};
}

/// Reorders modes: result mode m is input mode perm[m].
inline DenseTensor permute(const DenseTensor& a, std::span<const std::size_t> perm) {
  const std::size_t d = a.order();
  if (perm.size() != d) throw DimensionError("permutation length does not match tensor order");
  std::vector<bool> seen(d, false);
  for (std::size_t p : perm) {
    if (p >= d || seen[p]) throw DimensionError("invalid mode permutation");
    seen[p] = true;
  }

  Shape in_strides(d, 1);
  for (std::size_t m = 1; m < d; ++m) in_strides[m] = in_strides[m - 1] * a.extent(m - 1);

  Shape out_shape(d);
  Shape stride_of_out(d);
  for (std::size_t m = 0; m < d; ++m) {
    out_shape[m] = a.extent(perm[m]);
    stride_of_out[m] = in_strides[perm[m]];
  }

  DenseTensor out(out_shape);
  std::vector<std::size_t> counter(d, 0);
  std::size_t src = 0;
  auto dst = out.values();
  const auto src_values = a.values();
  for (std::size_t n = 0; n < dst.size(); ++n) {
    dst[n] = src_values[src];
    for (std::size_t m = 0; m < d; ++m) {
      src += stride_of_out[m];
      if (++counter[m] < out_shape[m]) break;
      src -= stride_of_out[m] * out_shape[m];
      counter[m] = 0;
    }
  }
  return out;
}

/**
 * Contracts mode `mode_a` of `a` with mode `mode_b` of `b`.
 *
 * The result carries the remaining modes of `a` followed by the remaining
 * modes of `b`. A full contraction of two vectors yields a one-element
 * tensor of shape (1). Contracting singleton modes gives the outer product.
 */
inline DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::size_t mode_a,
                            std::size_t mode_b) {
  if (mode_a >= a.order() || mode_b >= b.order()) {
    throw DimensionError("contraction mode out of range");
  }
  const std::size_t k = a.extent(mode_a);
  if (k != b.extent(mode_b)) {
    throw DimensionError("cannot contract extent " + std::to_string(k) + " of mode " +
                         std::to_string(mode_a) + " with extent " + std::to_string(b.extent(mode_b)) +
                         " of mode " + std::to_string(mode_b));
  }

  std::vector<std::size_t> perm_a;
  Shape rest_a;
  for (std::size_t m = 0; m < a.order(); ++m) {
    if (m == mode_a) continue;
    perm_a.push_back(m);
    rest_a.push_back(a.extent(m));
  }
  perm_a.push_back(mode_a);

  std::vector<std::size_t> perm_b{mode_b};
  Shape rest_b;
  for (std::size_t m = 0; m < b.order(); ++m) {
    if (m == mode_b) continue;
    perm_b.push_back(m);
    rest_b.push_back(b.extent(m));
  }

  const DenseTensor ap = permute(a, perm_a);
  const DenseTensor bp = permute(b, perm_b);
  const auto rows = static_cast<Eigen::Index>(shape_size(rest_a));
  const auto cols = static_cast<Eigen::Index>(shape_size(rest_b));
  const auto inner = static_cast<Eigen::Index>(k);

  Shape out_shape = rest_a;
  out_shape.insert(out_shape.end(), rest_b.begin(), rest_b.end());
  if (out_shape.empty()) out_shape.push_back(1);

  DenseTensor out(out_shape);
  Eigen::Map<Eigen::MatrixXd>(out.data(), rows, cols).noalias() =
      Eigen::Map<const Eigen::MatrixXd>(ap.data(), rows, inner) *
      Eigen::Map<const Eigen::MatrixXd>(bp.data(), inner, cols);
  return out;
}

/// Sum of entry-wise products of two equally shaped tensors.
inline double inner(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("inner product of shapes " + shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
  }
  double s = 0.0;
  const auto x = a.values();
  const auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/**
 * Mode-`mode` product keeping the mode in place:
 * out(..., r, ...) = sum_i c(r, i) * a(..., i, ...).
 */
inline DenseTensor mode_product(const DenseTensor& a, const Eigen::MatrixXd& c, std::size_t mode) {
  if (mode >= a.order()) throw DimensionError("mode product index out of range");
  if (static_cast<std::size_t>(c.cols()) != a.extent(mode)) {
    throw DimensionError("matrix with " + std::to_string(c.cols()) + " columns cannot act on extent " +
                         std::to_string(a.extent(mode)));
  }
  const std::size_t lead = shape_size(Shape(a.shape().begin(), a.shape().begin() + mode));
  const std::size_t trail = a.size() / (lead * a.extent(mode));
  Shape out_shape = a.shape();
  out_shape[mode] = static_cast<std::size_t>(c.rows());
  DenseTensor out(out_shape);

  const auto k = static_cast<Eigen::Index>(a.extent(mode));
  const auto r = c.rows();
  const auto l = static_cast<Eigen::Index>(lead);
  for (std::size_t t = 0; t < trail; ++t) {
    Eigen::Map<const Eigen::MatrixXd> slab(a.data() + t * lead * a.extent(mode), l, k);
    Eigen::Map<Eigen::MatrixXd> dst(out.data() + t * lead * static_cast<std::size_t>(r), l, r);
    dst.noalias() = slab * c.transpose();
  }
  return out;
}

/// Outer product of vectors, b[0] varying fastest.
inline DenseTensor outer_product(std::span<const Eigen::VectorXd> factors) {
  if (factors.empty()) throw DimensionError("outer product needs at least one factor");
  Shape shape;
  for (const auto& f : factors) shape.push_back(static_cast<std::size_t>(f.size()));
  DenseTensor out(shape);
  auto v = out.values();
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t n = 0; n < v.size(); ++n) {
    double prod = 1.0;
    for (std::size_t m = 0; m < shape.size(); ++m) prod *= factors[m](static_cast<Eigen::Index>(idx[m]));
    v[n] = prod;
    for (std::size_t m = 0; m < shape.size(); ++m) {
      if (++idx[m] < shape[m]) break;
      idx[m] = 0;
    }
  }
  return out;
}

}  // namespace tnbs

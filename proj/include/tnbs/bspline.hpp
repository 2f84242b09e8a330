/**
 * @file bspline.hpp
 * @brief Uniform B-spline bases on the unit natural domain.
 *
 * A basis of degree rho with knot parameter m has m+1 uniform knots
 * t_i = (i - rho) / (m - 2 rho), i = 0..m, and k = m - rho basis functions.
 * The natural domain [t_rho, t_{m-rho}] is exactly [0, 1]; there the basis
 * is a partition of unity.
 *
 * Function i (0-based) is supported on [t_i, t_{i+rho+1}] and is evaluated
 * with the Cox-de Boor recursion.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tnbs/error.hpp"

namespace tnbs {

class BasisConfig {
 public:
  int degree() const noexcept { return degree_; }
  int knot_param() const noexcept { return knot_param_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  std::size_t basis_count() const noexcept { return static_cast<std::size_t>(knot_param_ - degree_); }

  friend BasisConfig make_basis(int degree, int knot_param);
  friend bool operator==(const BasisConfig&, const BasisConfig&) = default;

 private:
  int degree_ = 0;
  int knot_param_ = 0;
  std::vector<double> knots_;
};

inline BasisConfig make_basis(int degree, int knot_param) {
  if (degree < 0) throw ConfigError("B-spline degree must be non-negative, got " + std::to_string(degree));
  if (knot_param <= 2 * degree) {
    throw ConfigError("knot parameter m=" + std::to_string(knot_param) + " must exceed 2*degree=" +
                      std::to_string(2 * degree));
  }
  BasisConfig cfg;
  cfg.degree_ = degree;
  cfg.knot_param_ = knot_param;
  cfg.knots_.resize(static_cast<std::size_t>(knot_param) + 1);
  const double span = knot_param - 2 * degree;
  for (int i = 0; i <= knot_param; ++i) cfg.knots_[static_cast<std::size_t>(i)] = (i - degree) / span;
  return cfg;
}

/// Counts evaluations whose argument had to be clipped into [0, 1].
struct ClipCounter {
  std::size_t clipped = 0;
};

/**
 * Basis vector [B_1(x), ..., B_k(x)].
 *
 * Arguments outside [0, 1] are clipped (and counted when `counter` is given).
 * The last natural-domain span is closed on the right, so x = 1 yields the
 * left limit instead of the all-zero vector of the half-open indicator.
 */
inline void eval_basis_into(const BasisConfig& cfg, double x, std::span<double> out, ClipCounter* counter = nullptr) {
  if (!std::isfinite(x)) throw InputError("cannot evaluate B-spline basis at a non-finite argument");
  const std::size_t k = cfg.basis_count();
  if (out.size() != k) throw DimensionError("basis output buffer has wrong length");
  if (x < 0.0 || x > 1.0) {
    x = std::clamp(x, 0.0, 1.0);
    if (counter) ++counter->clipped;
  }

  const int rho = cfg.degree();
  const int m = cfg.knot_param();
  const auto& t = cfg.knots();

  // Span j with t_j <= x < t_{j+1}, restricted to the natural domain.
  const int last_span = m - rho - 1;
  int j = rho + static_cast<int>(std::floor(x * (m - 2 * rho)));
  j = std::clamp(j, rho, last_span);
  // Floor may land one off because of rounding in the knot values.
  while (j > rho && x < t[static_cast<std::size_t>(j)]) --j;
  while (j < last_span && x >= t[static_cast<std::size_t>(j) + 1]) ++j;

  // Degree-0 functions over all m spans, then raise the degree in place.
  std::vector<double> b(static_cast<std::size_t>(m), 0.0);
  b[static_cast<std::size_t>(j)] = 1.0;
  for (int p = 1; p <= rho; ++p) {
    for (int i = 0; i + p < m; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const auto pu = static_cast<std::size_t>(p);
      double v = 0.0;
      const double left_den = t[iu + pu] - t[iu];
      if (left_den != 0.0 && b[iu] != 0.0) v += (x - t[iu]) / left_den * b[iu];
      const double right_den = t[iu + pu + 1] - t[iu + 1];
      if (right_den != 0.0 && b[iu + 1] != 0.0) v += (t[iu + pu + 1] - x) / right_den * b[iu + 1];
      b[iu] = v;
    }
  }
  std::copy_n(b.begin(), k, out.begin());
}

inline std::vector<double> eval_basis(const BasisConfig& cfg, double x, ClipCounter* counter = nullptr) {
  std::vector<double> out(cfg.basis_count());
  eval_basis_into(cfg, x, out, counter);
  return out;
}

/// One basis vector per sample, stacked as rows (xs.size() x k).
inline Eigen::MatrixXd basis_rows(const BasisConfig& cfg, std::span<const double> xs, ClipCounter* counter = nullptr) {
  const std::size_t k = cfg.basis_count();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(k));
  std::vector<double> buf(k);
  for (std::size_t n = 0; n < xs.size(); ++n) {
    eval_basis_into(cfg, xs[n], buf, counter);
    for (std::size_t i = 0; i < k; ++i) rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = buf[i];
  }
  return rows;
}

}  // namespace tnbs

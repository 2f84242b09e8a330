/**
 * @file model.hpp
 * @brief TNBS surfaces and the NARX wrapper around them.
 *
 * A TnbsModel maps d lagged, min-max scaled regressors to the next output:
 *
 *   S(x_1, ..., x_d) = prod_p ( G_p contracted with b(x_p) )
 *
 * where b(x_p) is the B-spline basis vector and every factor is an
 * r_{p-1} x r_p matrix. Regressors are ordered as all input lags ascending,
 * then all output lags ascending.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnbs/bspline.hpp"
#include "tnbs/error.hpp"
#include "tnbs/tensor_train.hpp"

namespace tnbs {

using Signal = std::vector<double>;

struct LagSpec {
  std::vector<std::size_t> input_lags;   // lags applied to u, >= 0
  std::vector<std::size_t> output_lags;  // lags applied to y, >= 1

  std::size_t dimension() const noexcept { return input_lags.size() + output_lags.size(); }
  std::size_t max_input_lag() const noexcept { return input_lags.empty() ? 0 : input_lags.back(); }
  std::size_t max_output_lag() const noexcept { return output_lags.empty() ? 0 : output_lags.back(); }
  /// First (0-based) sample index that has a complete regressor row.
  std::size_t first_index() const noexcept { return std::max(max_input_lag(), max_output_lag()); }

  void validate() const {
    if (dimension() == 0) throw ConfigError("lag specification must contain at least one lag");
    auto strictly_sorted = [](const std::vector<std::size_t>& v) {
      return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>{}) == v.end();
    };
    if (!strictly_sorted(input_lags) || !strictly_sorted(output_lags)) {
      throw ConfigError("lags must be strictly increasing");
    }
    if (!output_lags.empty() && output_lags.front() == 0) {
      throw ConfigError("output lags must be at least 1");
    }
  }

  friend bool operator==(const LagSpec&, const LagSpec&) = default;
};

inline LagSpec make_lag_spec(std::vector<std::size_t> input_lags, std::vector<std::size_t> output_lags) {
  std::sort(input_lags.begin(), input_lags.end());
  std::sort(output_lags.begin(), output_lags.end());
  LagSpec lags{std::move(input_lags), std::move(output_lags)};
  lags.validate();
  return lags;
}

/// Min-max normalization of input and output to [0, 1].
struct Scaling {
  double u_min = 0.0;
  double u_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  static Scaling identity() { return {}; }

  void validate() const {
    if (!(u_min < u_max) || !(y_min < y_max)) throw ConfigError("degenerate scaling: min must be below max");
  }

  double apply_u(double u) const { return (u - u_min) / (u_max - u_min); }
  double apply_y(double y) const { return (y - y_min) / (y_max - y_min); }
  double descale_y(double s) const { return y_min + s * (y_max - y_min); }

  friend bool operator==(const Scaling&, const Scaling&) = default;
};

inline Scaling fit_scaling(std::span<const double> u, std::span<const double> y) {
  if (u.empty() || y.empty()) throw InputError("cannot fit scaling on empty signals");
  const auto [u_lo, u_hi] = std::minmax_element(u.begin(), u.end());
  const auto [y_lo, y_hi] = std::minmax_element(y.begin(), y.end());
  if (!(*u_lo < *u_hi)) throw InputError("degenerate scaling: input signal is constant");
  if (!(*y_lo < *y_hi)) throw InputError("degenerate scaling: output signal is constant");
  return {*u_lo, *u_hi, *y_lo, *y_hi};
}

class TnbsModel {
 public:
  TnbsModel(BasisConfig basis, LagSpec lags, TensorTrain weights, Scaling scaling)
      : basis_(std::move(basis)), lags_(std::move(lags)), weights_(std::move(weights)), scaling_(scaling) {
    lags_.validate();
    scaling_.validate();
    if (weights_.order() != lags_.dimension()) {
      throw DimensionError("weights have " + std::to_string(weights_.order()) + " cores but the lag spec has " +
                           std::to_string(lags_.dimension()) + " regressors");
    }
    for (std::size_t k : weights_.extents()) {
      if (k != basis_.basis_count()) {
        throw DimensionError("core extent " + std::to_string(k) + " differs from basis count " +
                             std::to_string(basis_.basis_count()));
      }
    }
  }

  const BasisConfig& basis() const noexcept { return basis_; }
  const LagSpec& lags() const noexcept { return lags_; }
  const TensorTrain& weights() const noexcept { return weights_; }
  const Scaling& scaling() const noexcept { return scaling_; }
  std::size_t dimension() const noexcept { return lags_.dimension(); }

  friend bool operator==(const TnbsModel&, const TnbsModel&) = default;

 private:
  BasisConfig basis_;
  LagSpec lags_;
  TensorTrain weights_;
  Scaling scaling_;
};

/// Surface value at a point given in scaled units.
inline double eval_surface(const BasisConfig& basis, const TensorTrain& weights, std::span<const double> x,
                           ClipCounter* counter = nullptr) {
  if (x.size() != weights.order()) {
    throw DimensionError("surface of dimension " + std::to_string(weights.order()) + " evaluated at a point of length " +
                         std::to_string(x.size()));
  }
  const std::size_t k = basis.basis_count();
  std::vector<double> b(k);
  Eigen::RowVectorXd left = Eigen::RowVectorXd::Ones(1);
  for (std::size_t p = 0; p < weights.order(); ++p) {
    const DenseTensor& core = weights.core(p);
    eval_basis_into(basis, x[p], b, counter);
    // (1 x r0) * reshape(core, r0, k*r1) gives the k*r1 row, then fold the basis in.
    const Eigen::RowVectorXd lg = left * right_unfolding(core);
    const auto r1 = static_cast<Eigen::Index>(core.extent(2));
    Eigen::RowVectorXd next = Eigen::RowVectorXd::Zero(r1);
    for (std::size_t i = 0; i < k; ++i) {
      if (b[i] == 0.0) continue;
      for (Eigen::Index c = 0; c < r1; ++c) next(c) += b[i] * lg(static_cast<Eigen::Index>(i) + static_cast<Eigen::Index>(k) * c);
    }
    left = std::move(next);
  }
  return left(0);
}

inline double eval_surface(const TnbsModel& model, std::span<const double> x, ClipCounter* counter = nullptr) {
  return eval_surface(model.basis(), model.weights(), x, counter);
}

/// Scaled regressor rows and targets for samples first_index .. N-1.
struct Regressors {
  Eigen::MatrixXd x;
  Eigen::VectorXd target;
  std::size_t first_index = 0;
};

namespace detail {

inline void check_signals(std::span<const double> u, std::span<const double> y, const LagSpec& lags) {
  if (u.size() != y.size()) {
    throw InputError("input and output signals differ in length (" + std::to_string(u.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (u.size() < lags.first_index() + 1) {
    throw InputError("signals of length " + std::to_string(u.size()) + " are too short for a maximum lag of " +
                     std::to_string(lags.first_index()));
  }
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!std::isfinite(u[n]) || !std::isfinite(y[n])) {
      throw InputError("non-finite sample at index " + std::to_string(n));
    }
  }
}

}  // namespace detail

inline Regressors build_regressors(std::span<const double> u, std::span<const double> y, const LagSpec& lags,
                                   const Scaling& scaling) {
  lags.validate();
  detail::check_signals(u, y, lags);
  const std::size_t n0 = lags.first_index();
  const std::size_t rows = u.size() - n0;

  Regressors out;
  out.first_index = n0;
  out.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(lags.dimension()));
  out.target.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t n = n0 + r;
    const auto re = static_cast<Eigen::Index>(r);
    Eigen::Index c = 0;
    for (std::size_t lag : lags.input_lags) out.x(re, c++) = scaling.apply_u(u[n - lag]);
    for (std::size_t lag : lags.output_lags) out.x(re, c++) = scaling.apply_y(y[n - lag]);
    out.target(re) = scaling.apply_y(y[n]);
  }
  return out;
}

/// One-step-ahead predictions (original units) for samples first_index .. N-1.
inline Signal predict(const TnbsModel& model, std::span<const double> u, std::span<const double> y,
                      ClipCounter* counter = nullptr) {
  const Regressors reg = build_regressors(u, y, model.lags(), model.scaling());
  Signal out(static_cast<std::size_t>(reg.x.rows()));
  std::vector<double> row(model.dimension());
  for (Eigen::Index r = 0; r < reg.x.rows(); ++r) {
    for (Eigen::Index c = 0; c < reg.x.cols(); ++c) row[static_cast<std::size_t>(c)] = reg.x(r, c);
    out[static_cast<std::size_t>(r)] = model.scaling().descale_y(eval_surface(model, row, counter));
  }
  return out;
}

/**
 * Free-run simulation for samples first_index .. N-1 (original units).
 *
 * `y_warmup` holds true outputs immediately preceding first_index; only its
 * last max_output_lag entries are used. Simulated outputs are clipped to the
 * scaled unit interval before they re-enter the regressor.
 */
inline Signal simulate(const TnbsModel& model, std::span<const double> u, std::span<const double> y_warmup,
                       ClipCounter* counter = nullptr) {
  const LagSpec& lags = model.lags();
  const std::size_t n0 = lags.first_index();
  const std::size_t w = lags.max_output_lag();
  if (y_warmup.size() < w) {
    throw InputError("simulation needs " + std::to_string(w) + " warm-up outputs, got " +
                     std::to_string(y_warmup.size()));
  }
  if (u.size() < n0 + 1) {
    throw InputError("input of length " + std::to_string(u.size()) + " is too short for a maximum lag of " +
                     std::to_string(n0));
  }
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!std::isfinite(u[n])) throw InputError("non-finite input sample at index " + std::to_string(n));
  }
  for (double v : y_warmup) {
    if (!std::isfinite(v)) throw InputError("non-finite warm-up sample");
  }

  const Scaling& sc = model.scaling();
  // history[n] holds the scaled output fed back at sample n.
  std::vector<double> history(u.size(), 0.0);
  for (std::size_t i = 0; i < w; ++i) {
    history[n0 - w + i] = sc.apply_y(y_warmup[y_warmup.size() - w + i]);
  }

  Signal out;
  out.reserve(u.size() - n0);
  std::vector<double> row(lags.dimension());
  for (std::size_t n = n0; n < u.size(); ++n) {
    std::size_t c = 0;
    for (std::size_t lag : lags.input_lags) row[c++] = sc.apply_u(u[n - lag]);
    for (std::size_t lag : lags.output_lags) row[c++] = history[n - lag];
    const double s = eval_surface(model, row, counter);
    if (!std::isfinite(s)) throw NumericalError("simulation produced a non-finite output at sample " + std::to_string(n));
    history[n] = std::clamp(s, 0.0, 1.0);
    out.push_back(sc.descale_y(s));
  }
  return out;
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    throw DimensionError("rmse of signals with lengths " + std::to_string(y.size()) + " and " +
                         std::to_string(yhat.size()));
  }
  if (y.empty()) throw InputError("rmse of empty signals");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(s / static_cast<double>(y.size()));
}

}  // namespace tnbs

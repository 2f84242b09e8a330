/**
 * @file tensor_train.hpp
 * @brief Tensor trains: validation, reconstruction, TT-SVD and the QR-based
 * canonical-form machinery used by the alternating solver.
 *
 * Core p has shape (r_{p-1}, k_p, r_p) with r_0 = r_d = 1. Because storage is
 * first-index-fastest, a core's buffer is simultaneously
 *   - its left unfolding, an (r_{p-1} k_p) x r_p column-major matrix, and
 *   - its right unfolding, an r_{p-1} x (k_p r_p) column-major matrix,
 * so no copies are needed to switch between the two views.
 *
 * Sites are 0-based throughout the C++ API.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnbs/dense_tensor.hpp"
#include "tnbs/error.hpp"

namespace tnbs {

/// Dense reconstructions are debug/oracle paths and refuse anything larger.
inline constexpr std::size_t kDenseElementCap = 10'000'000;

enum class Direction { left, right };

class TensorTrain {
 public:
  explicit TensorTrain(std::vector<DenseTensor> cores, std::optional<std::size_t> canonical_site = std::nullopt)
      : cores_(std::move(cores)), canonical_site_(canonical_site) {
    validate();
  }

  std::size_t order() const noexcept { return cores_.size(); }
  const std::vector<DenseTensor>& cores() const noexcept { return cores_; }
  const DenseTensor& core(std::size_t p) const { return cores_.at(p); }
  std::optional<std::size_t> canonical_site() const noexcept { return canonical_site_; }

  /// (r_0, ..., r_d).
  std::vector<std::size_t> ranks() const {
    std::vector<std::size_t> r{1};
    for (const auto& c : cores_) r.push_back(c.extent(2));
    return r;
  }

  /// (r_1, ..., r_{d-1}).
  std::vector<std::size_t> interior_ranks() const {
    std::vector<std::size_t> r;
    for (std::size_t p = 0; p + 1 < cores_.size(); ++p) r.push_back(cores_[p].extent(2));
    return r;
  }

  Shape extents() const {
    Shape k;
    for (const auto& c : cores_) k.push_back(c.extent(1));
    return k;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& c : cores_) n += c.size();
    return n;
  }

  /// Copy with core p replaced; the replacement must keep the connecting ranks.
  TensorTrain with_core(std::size_t p, DenseTensor core, std::optional<std::size_t> canonical_site) const {
    std::vector<DenseTensor> cores = cores_;
    cores.at(p) = std::move(core);
    return TensorTrain(std::move(cores), canonical_site);
  }

  friend bool operator==(const TensorTrain&, const TensorTrain&) = default;

 private:
  void validate() const {
    if (cores_.empty()) throw DimensionError("tensor train needs at least one core");
    for (std::size_t p = 0; p < cores_.size(); ++p) {
      if (cores_[p].order() != 3) {
        throw DimensionError("core " + std::to_string(p) + " must be third order, got shape " +
                             shape_to_string(cores_[p].shape()));
      }
    }
    if (cores_.front().extent(0) != 1 || cores_.back().extent(2) != 1) {
      throw DimensionError("boundary ranks of a tensor train must equal 1");
    }
    for (std::size_t p = 0; p + 1 < cores_.size(); ++p) {
      if (cores_[p].extent(2) != cores_[p + 1].extent(0)) {
        throw DimensionError("rank mismatch between core " + std::to_string(p) + " (" +
                             std::to_string(cores_[p].extent(2)) + ") and core " + std::to_string(p + 1) + " (" +
                             std::to_string(cores_[p + 1].extent(0)) + ")");
      }
    }
    if (canonical_site_ && *canonical_site_ >= cores_.size()) {
      throw DimensionError("canonical site " + std::to_string(*canonical_site_) + " out of range");
    }
  }

  std::vector<DenseTensor> cores_;
  std::optional<std::size_t> canonical_site_;
};

// --- unfoldings ----------------------------------------------------------

inline Eigen::Map<const Eigen::MatrixXd> left_unfolding(const DenseTensor& core) {
  return {core.data(), static_cast<Eigen::Index>(core.extent(0) * core.extent(1)),
          static_cast<Eigen::Index>(core.extent(2))};
}

inline Eigen::Map<const Eigen::MatrixXd> right_unfolding(const DenseTensor& core) {
  return {core.data(), static_cast<Eigen::Index>(core.extent(0)),
          static_cast<Eigen::Index>(core.extent(1) * core.extent(2))};
}

/// Slice core(:, i, :) as an r_{p-1} x r_p matrix.
inline Eigen::MatrixXd core_slice(const DenseTensor& core, std::size_t i) {
  const auto r0 = static_cast<Eigen::Index>(core.extent(0));
  const auto k = static_cast<Eigen::Index>(core.extent(1));
  const auto r1 = static_cast<Eigen::Index>(core.extent(2));
  Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>> view(core.data() + static_cast<Eigen::Index>(i) * r0,
                                                                 r0, r1, Eigen::OuterStride<>(r0 * k));
  return view;
}

inline DenseTensor core_from_matrix(const Eigen::MatrixXd& m, std::size_t r0, std::size_t k, std::size_t r1) {
  if (static_cast<std::size_t>(m.size()) != r0 * k * r1) throw DimensionError("core reshape size mismatch");
  return DenseTensor({r0, k, r1}, std::vector<double>(m.data(), m.data() + m.size()));
}

inline bool is_left_orthogonal(const DenseTensor& core, double tol = 1e-12) {
  const Eigen::MatrixXd g = left_unfolding(core);
  return (g.transpose() * g - Eigen::MatrixXd::Identity(g.cols(), g.cols())).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_right_orthogonal(const DenseTensor& core, double tol = 1e-12) {
  const Eigen::MatrixXd g = right_unfolding(core);
  return (g * g.transpose() - Eigen::MatrixXd::Identity(g.rows(), g.rows())).cwiseAbs().maxCoeff() <= tol;
}

// --- QR with fixed signs ---------------------------------------------------

namespace detail {

struct ThinQr {
  Eigen::MatrixXd q;  // m x n
  Eigen::MatrixXd r;  // n x n
};

/**
 * QR of an m x n matrix with non-negative diagonal of R, always returning an
 * m x n Q and an n x n R. When m < n only m orthonormal directions exist; Q
 * is padded with zero columns and R with zero rows so that the connecting
 * rank is preserved and q * r still equals the input.
 */
inline ThinQr thin_qr(const Eigen::MatrixXd& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  const Eigen::Index p = std::min(rows, cols);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);

  ThinQr out;
  out.q = Eigen::MatrixXd::Zero(rows, cols);
  out.q.leftCols(p) = qr.householderQ() * Eigen::MatrixXd::Identity(rows, p);
  out.r = Eigen::MatrixXd::Zero(cols, cols);
  out.r.topRows(p) = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

  for (Eigen::Index i = 0; i < p; ++i) {
    if (out.r(i, i) < 0.0) {
      out.r.row(i) *= -1.0;
      out.q.col(i) *= -1.0;
    }
  }
  return out;
}

/// Left-orthogonalize core p and push the triangular factor into core p+1.
inline void qr_step_right(std::vector<DenseTensor>& cores, std::size_t p) {
  DenseTensor& cur = cores[p];
  DenseTensor& next = cores[p + 1];
  const std::size_t r0 = cur.extent(0), k = cur.extent(1), r1 = cur.extent(2);
  const ThinQr f = thin_qr(left_unfolding(cur));
  const Eigen::MatrixXd merged = f.r * right_unfolding(next);
  cur = core_from_matrix(f.q, r0, k, r1);
  next = core_from_matrix(merged, next.extent(0), next.extent(1), next.extent(2));
}

/// Right-orthogonalize core p and push the triangular factor into core p-1.
inline void qr_step_left(std::vector<DenseTensor>& cores, std::size_t p) {
  DenseTensor& cur = cores[p];
  DenseTensor& prev = cores[p - 1];
  const std::size_t r0 = cur.extent(0), k = cur.extent(1), r1 = cur.extent(2);
  // cur = R^T Q^T with Q^T right-orthogonal.
  const ThinQr f = thin_qr(right_unfolding(cur).transpose());
  const Eigen::MatrixXd qt = f.q.transpose();
  const Eigen::MatrixXd merged = left_unfolding(prev) * f.r.transpose();
  cur = core_from_matrix(qt, r0, k, r1);
  prev = core_from_matrix(merged, prev.extent(0), prev.extent(1), prev.extent(2));
}

}  // namespace detail

// --- reconstruction --------------------------------------------------------

/// Dense tensor represented by the train; refuses results above `cap` elements.
inline DenseTensor tt_to_full(const TensorTrain& tt, std::size_t cap = kDenseElementCap) {
  const Shape shape = tt.extents();
  // Guard against overflow while checking the cap.
  std::size_t total = 1;
  for (std::size_t k : shape) {
    if (total > cap / k) {
      throw DimensionError("dense reconstruction of shape " + shape_to_string(shape) +
                           " exceeds the element cap of " + std::to_string(cap));
    }
    total *= k;
  }

  Eigen::MatrixXd acc = left_unfolding(tt.core(0));
  for (std::size_t p = 1; p < tt.order(); ++p) {
    const Eigen::MatrixXd next = acc * right_unfolding(tt.core(p));
    const auto r = static_cast<Eigen::Index>(tt.core(p).extent(2));
    acc = Eigen::Map<const Eigen::MatrixXd>(next.data(), next.size() / r, r);
  }
  return DenseTensor(shape, std::vector<double>(acc.data(), acc.data() + acc.size()));
}

// --- TT-SVD ----------------------------------------------------------------

namespace detail {

inline TensorTrain tt_svd_impl(const DenseTensor& a, std::span<const std::size_t> max_ranks, double rel_tolerance) {
  const std::size_t d = a.order();
  const Shape& k = a.shape();
  const double delta =
      d > 1 ? rel_tolerance / std::sqrt(static_cast<double>(d - 1)) * a.frobenius_norm() : 0.0;

  std::vector<DenseTensor> cores;
  cores.reserve(d);
  Eigen::MatrixXd rest = Eigen::Map<const Eigen::MatrixXd>(a.data(), 1, static_cast<Eigen::Index>(a.size()));
  std::size_t r_prev = 1;

  for (std::size_t p = 0; p + 1 < d; ++p) {
    const auto rows = static_cast<Eigen::Index>(r_prev * k[p]);
    const Eigen::Index cols = rest.size() / rows;
    const Eigen::Map<const Eigen::MatrixXd> unfolding(rest.data(), rows, cols);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(unfolding, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();

    std::size_t r = static_cast<std::size_t>(s.size());
    if (rel_tolerance > 0.0) {
      double tail = 0.0;
      while (r > 1 && std::sqrt(tail + s(static_cast<Eigen::Index>(r - 1)) * s(static_cast<Eigen::Index>(r - 1))) <= delta) {
        tail += s(static_cast<Eigen::Index>(r - 1)) * s(static_cast<Eigen::Index>(r - 1));
        --r;
      }
    }
    if (!max_ranks.empty()) r = std::min(r, max_ranks[p]);
    r = std::max<std::size_t>(r, 1);
    const auto re = static_cast<Eigen::Index>(r);

    cores.push_back(core_from_matrix(svd.matrixU().leftCols(re), r_prev, k[p], r));
    rest = s.head(re).asDiagonal() * svd.matrixV().leftCols(re).transpose();
    r_prev = r;
  }
  cores.push_back(core_from_matrix(rest, r_prev, k[d - 1], 1));
  return TensorTrain(std::move(cores), d - 1);
}

}  // namespace detail

/// Exact TT-SVD (ranks limited only by the unfolding ranks).
inline TensorTrain tt_svd(const DenseTensor& a) { return detail::tt_svd_impl(a, {}, 0.0); }

/// TT-SVD truncated to at most `max_ranks` (the d-1 interior ranks).
inline TensorTrain tt_svd(const DenseTensor& a, std::span<const std::size_t> max_ranks) {
  if (max_ranks.size() + 1 != a.order()) {
    throw DimensionError("expected " + std::to_string(a.order() - 1) + " interior ranks, got " +
                         std::to_string(max_ranks.size()));
  }
  for (std::size_t r : max_ranks) {
    if (r == 0) throw ConfigError("TT-ranks must be positive");
  }
  return detail::tt_svd_impl(a, max_ranks, 0.0);
}

/// TT-SVD with minimal ranks reaching relative Frobenius accuracy `rel_tolerance`.
inline TensorTrain tt_svd_tolerance(const DenseTensor& a, double rel_tolerance) {
  if (!(rel_tolerance >= 0.0)) throw ConfigError("relative tolerance must be non-negative");
  return detail::tt_svd_impl(a, {}, rel_tolerance);
}

// --- canonical forms -------------------------------------------------------

/// Site-s mixed canonical form: cores before s left-, after s right-orthogonal.
inline TensorTrain orthogonalize_to_site(const TensorTrain& tt, std::size_t s) {
  if (s >= tt.order()) {
    throw DimensionError("site " + std::to_string(s) + " out of range for a train of " +
                         std::to_string(tt.order()) + " cores");
  }
  std::vector<DenseTensor> cores = tt.cores();
  for (std::size_t p = 0; p < s; ++p) detail::qr_step_right(cores, p);
  for (std::size_t p = cores.size() - 1; p > s; --p) detail::qr_step_left(cores, p);
  return TensorTrain(std::move(cores), s);
}

/// Moves the canonical site from p one step in `direction` with a single QR.
inline TensorTrain shift_core(const TensorTrain& tt, std::size_t p, Direction direction) {
  if (tt.canonical_site() != p) {
    throw DimensionError("shift_core expects canonical site " + std::to_string(p) + ", train is at " +
                         (tt.canonical_site() ? std::to_string(*tt.canonical_site()) : std::string("none")));
  }
  std::vector<DenseTensor> cores = tt.cores();
  if (direction == Direction::right) {
    if (p + 1 >= cores.size()) throw DimensionError("cannot shift past the last core");
    detail::qr_step_right(cores, p);
    return TensorTrain(std::move(cores), p + 1);
  }
  if (p == 0) throw DimensionError("cannot shift before the first core");
  detail::qr_step_left(cores, p);
  return TensorTrain(std::move(cores), p - 1);
}

}  // namespace tnbs

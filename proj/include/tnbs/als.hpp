/**
 * @file als.hpp
 * @brief Regularized alternating linear scheme for TNBS identification.
 *
 * Each core update minimizes
 *
 *   || t - A_p g ||^2 + sum_j lambda_j g^T Omega_{p,j} g
 *
 * over the vectorized core g, with every other core fixed. A_p stacks the
 * rows (v_> (x) b (x) v_<) of the linearized surface and Omega_{p,j} is the
 * difference penalty along dimension j written as a quadratic form in g.
 * The Gram factors of Omega are contracted exactly from the current cores,
 * so the recorded objective equals the full penalized cost of the weight
 * tensor and can only decrease from one update to the next.
 *
 * Sweeps follow the usual schedule: cores 0..d-2 left to right, each followed
 * by a QR shift of the canonical site, then cores d-1..1 right to left.
 */

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnbs/bspline.hpp"
#include "tnbs/dense_tensor.hpp"
#include "tnbs/error.hpp"
#include "tnbs/model.hpp"
#include "tnbs/tensor_train.hpp"

namespace tnbs {

struct FitConfig {
  std::vector<std::size_t> ranks;  // interior ranks r_1..r_{d-1}
  std::size_t penalty_order = 2;
  std::vector<double> lambdas;     // one per dimension
  std::size_t max_sweeps = 16;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> batch_size;

  void validate(std::size_t d, std::size_t k) const {
    if (ranks.size() + 1 != d) {
      throw ConfigError("expected " + std::to_string(d - 1) + " interior ranks, got " + std::to_string(ranks.size()));
    }
    for (std::size_t r : ranks) {
      if (r == 0) throw ConfigError("TT-ranks must be at least 1");
    }
    if (lambdas.size() != d) {
      throw ConfigError("expected " + std::to_string(d) + " smoothing parameters, got " +
                        std::to_string(lambdas.size()));
    }
    for (double l : lambdas) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("smoothing parameters must be finite and non-negative");
    }
    if (penalty_order >= k) {
      throw ConfigError("penalty order " + std::to_string(penalty_order) + " must be below the basis count " +
                        std::to_string(k));
    }
    if (!(epsilon >= 0.0)) throw ConfigError("stopping tolerance must be non-negative");
    if (max_sweeps == 0) throw ConfigError("at least one sweep is required");
    if (batch_size && *batch_size == 0) throw ConfigError("batch size must be positive");
  }
};

/// Uniform interior ranks and a broadcast smoothing parameter.
inline FitConfig make_fit_config(std::size_t d, std::size_t rank, std::size_t penalty_order, double lambda,
                                 std::size_t max_sweeps, std::uint64_t seed) {
  FitConfig cfg;
  cfg.ranks.assign(d > 0 ? d - 1 : 0, rank);
  cfg.penalty_order = penalty_order;
  cfg.lambdas.assign(d, lambda);
  cfg.max_sweeps = max_sweeps;
  cfg.seed = seed;
  return cfg;
}

struct UpdateRecord {
  std::size_t sweep = 0;
  std::size_t core = 0;
  double objective = 0.0;  // residual + penalty after the update
  double residual = 0.0;   // || t - A g ||^2
  double penalty = 0.0;    // sum_j lambda_j g^T Omega_j g
  double condition = 1.0;  // of the regularized normal matrix
  bool pseudo_inverse = false;
};

struct SweepTrace {
  std::vector<double> first_core_objectives;  // J_h after the first update of sweep h
  std::vector<UpdateRecord> updates;
  std::size_t sweeps_run = 0;
  bool converged = false;  // stopped by the tolerance rather than the sweep cap
  std::size_t clipped_inputs = 0;
  std::size_t pseudo_inverse_solves = 0;
  double max_condition = 1.0;
};

// --- penalty building blocks ----------------------------------------------

/// (k - alpha) x k matrix of alpha-th order forward differences.
inline Eigen::MatrixXd difference_matrix(std::size_t k, std::size_t alpha) {
  if (alpha >= k) {
    throw ConfigError("difference order " + std::to_string(alpha) + " needs more than " + std::to_string(k) +
                      " weights");
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t a = 0; a < alpha; ++a) {
    const Eigen::Index n = d.rows() - 1;
    const Eigen::MatrixXd next = d.topRows(n) - d.bottomRows(n);
    d = next;
  }
  return d;
}

/// || W x_j D ||^2 on a dense weight tensor.
inline double dense_penalty(const DenseTensor& w, const Eigen::MatrixXd& d, std::size_t j) {
  if (j >= w.order()) throw DimensionError("penalty dimension out of range");
  if (static_cast<std::size_t>(d.cols()) != w.extent(j)) {
    throw DimensionError("difference matrix with " + std::to_string(d.cols()) + " columns cannot act on extent " +
                         std::to_string(w.extent(j)));
  }
  const double n = mode_product(w, d, j).frobenius_norm();
  return n * n;
}

namespace detail {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Core with the difference matrix applied to its physical mode.
inline DenseTensor differenced_core(const DenseTensor& core, const Eigen::MatrixXd& d) {
  return mode_product(core, d, 1);
}

/// L' = sum_i G_i^T L G_i.
inline Eigen::MatrixXd advance_left_gram(const Eigen::MatrixXd& l, const DenseTensor& core) {
  const auto r0 = static_cast<Eigen::Index>(core.extent(0));
  const auto r1 = static_cast<Eigen::Index>(core.extent(2));
  const auto g = left_unfolding(core);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r1, r1);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(core.extent(1)); ++i) {
    const auto gi = g.middleRows(i * r0, r0);
    out.noalias() += gi.transpose() * (l * gi);
  }
  return out;
}

/// R' = sum_i G_i R G_i^T.
inline Eigen::MatrixXd advance_right_gram(const Eigen::MatrixXd& r, const DenseTensor& core) {
  const auto r0 = static_cast<Eigen::Index>(core.extent(0));
  const auto g = left_unfolding(core);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r0, r0);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(core.extent(1)); ++i) {
    const auto gi = g.middleRows(i * r0, r0);
    out.noalias() += gi * (r * gi.transpose());
  }
  return out;
}

/// Gram of cores 0..p-1, with `d` applied to core j when j < p.
inline Eigen::MatrixXd left_gram(const TensorTrain& tt, std::size_t p, const Eigen::MatrixXd* d, std::size_t j) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t q = 0; q < p; ++q) {
    l = (d && q == j) ? advance_left_gram(l, differenced_core(tt.core(q), *d)) : advance_left_gram(l, tt.core(q));
  }
  return l;
}

/// Gram of cores p+1..d-1, with `d` applied to core j when j > p.
inline Eigen::MatrixXd right_gram(const TensorTrain& tt, std::size_t p, const Eigen::MatrixXd* d, std::size_t j) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t q = tt.order(); q-- > p + 1;) {
    r = (d && q == j) ? advance_right_gram(r, differenced_core(tt.core(q), *d)) : advance_right_gram(r, tt.core(q));
  }
  return r;
}

inline void require_site(const TensorTrain& tt, std::size_t p, const char* what) {
  if (p >= tt.order()) throw DimensionError(std::string(what) + ": core index out of range");
  if (tt.canonical_site() != p) {
    throw DimensionError(std::string(what) + " expects the train in site-" + std::to_string(p) + " canonical form");
  }
}

}  // namespace detail

/**
 * Linearized design matrix for core p: row n is v_>(n) (x) b_p(n) (x) v_<(n),
 * so that A * vec(core p) reproduces the surface on every sample.
 * `basis` holds one N x k matrix of basis rows per dimension.
 */
inline Eigen::MatrixXd build_A(const TensorTrain& tt, std::span<const Eigen::MatrixXd> basis, std::size_t p) {
  detail::require_site(tt, p, "build_A");
  if (basis.size() != tt.order()) throw DimensionError("need one basis-row matrix per dimension");
  const Eigen::Index n = basis[0].rows();
  for (std::size_t q = 0; q < basis.size(); ++q) {
    if (basis[q].rows() != n || static_cast<std::size_t>(basis[q].cols()) != tt.core(q).extent(1)) {
      throw DimensionError("basis rows for dimension " + std::to_string(q) + " have the wrong shape");
    }
  }

  Eigen::MatrixXd left = Eigen::MatrixXd::Ones(n, 1);
  for (std::size_t q = 0; q < p; ++q) {
    const DenseTensor& core = tt.core(q);
    const auto r0 = static_cast<Eigen::Index>(core.extent(0));
    const auto g = left_unfolding(core);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(core.extent(2)));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(core.extent(1)); ++i) {
      next.noalias() += basis[q].col(i).asDiagonal() * (left * g.middleRows(i * r0, r0));
    }
    left = std::move(next);
  }

  Eigen::MatrixXd right = Eigen::MatrixXd::Ones(n, 1);
  for (std::size_t q = tt.order(); q-- > p + 1;) {
    const DenseTensor& core = tt.core(q);
    const auto r0 = static_cast<Eigen::Index>(core.extent(0));
    const auto g = left_unfolding(core);
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, r0);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(core.extent(1)); ++i) {
      next.noalias() += basis[q].col(i).asDiagonal() * (right * g.middleRows(i * r0, r0).transpose());
    }
    right = std::move(next);
  }

  const DenseTensor& core = tt.core(p);
  const auto r0 = static_cast<Eigen::Index>(core.extent(0));
  const auto k = static_cast<Eigen::Index>(core.extent(1));
  const auto r1 = static_cast<Eigen::Index>(core.extent(2));
  const Eigen::MatrixXd& b = basis[p];
  Eigen::MatrixXd a(n, r0 * k * r1);
  for (Eigen::Index c = 0; c < r1; ++c) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Eigen::ArrayXd w = b.col(i).array() * right.col(c).array();
      for (Eigen::Index l = 0; l < r0; ++l) a.col(l + r0 * (i + k * c)) = w * left.col(l).array();
    }
  }
  return a;
}

/**
 * Quadratic form of the dimension-j difference penalty in vec(core p):
 * g^T Omega g == || W x_j D ||^2 with W the represented tensor.
 *
 * Omega = C_> (x) C_- (x) C_<; for j == p the outer factors are the Grams of
 * the (orthogonal) neighbouring chains and C_- = D^T D, otherwise C_- = I and
 * D enters the Gram chain on the side that contains dimension j.
 */
inline Eigen::MatrixXd build_omega(const TensorTrain& tt, const Eigen::MatrixXd& d, std::size_t p, std::size_t j) {
  detail::require_site(tt, p, "build_omega");
  if (j >= tt.order()) throw DimensionError("penalty dimension out of range");
  if (static_cast<std::size_t>(d.cols()) != tt.core(j).extent(1)) {
    throw DimensionError("difference matrix does not match the core extent");
  }
  const Eigen::MatrixXd c_left = detail::left_gram(tt, p, j < p ? &d : nullptr, j);
  const Eigen::MatrixXd c_right = detail::right_gram(tt, p, j > p ? &d : nullptr, j);
  const auto k = static_cast<Eigen::Index>(tt.core(p).extent(1));
  const Eigen::MatrixXd c_mid = j == p ? Eigen::MatrixXd(d.transpose() * d) : Eigen::MatrixXd::Identity(k, k);
  return detail::kron(c_right, detail::kron(c_mid, c_left));
}

// --- core subproblem -----------------------------------------------------

struct CoreSolution {
  Eigen::VectorXd g;
  double condition = 1.0;
  bool pseudo_inverse = false;
};

namespace detail {

/// Solves the symmetric PSD system m g = rhs; minimal-norm solution when singular.
inline CoreSolution solve_normal_equations(Eigen::MatrixXd m, const Eigen::VectorXd& rhs) {
  if (!m.allFinite() || !rhs.allFinite()) throw NumericalError("normal equations contain non-finite entries");
  m = 0.5 * (m + m.transpose()).eval();

  CoreSolution out;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    const double rcond = llt.rcond();
    if (rcond > 1e-12) {
      out.g = llt.solve(rhs);
      out.condition = 1.0 / rcond;
      if (out.g.allFinite()) return out;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double cut = top * static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  double smallest_kept = top;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cut) {
      inv(i) = 1.0 / ev(i);
      smallest_kept = std::min(smallest_kept, ev(i));
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  out.g = v * (inv.asDiagonal() * (v.transpose() * rhs));
  out.condition = (inv.array() == 0.0).any() ? std::numeric_limits<double>::infinity() : top / smallest_kept;
  out.pseudo_inverse = true;
  if (!out.g.allFinite()) throw NumericalError("core update produced non-finite values");
  return out;
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.cols(), a.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace detail

/// Solves (A^T A + sum_j lambda_j Omega_j) g = A^T y.
inline CoreSolution update_core(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                std::span<const Eigen::MatrixXd> omegas, std::span<const double> lambdas) {
  if (a.rows() != y.size()) throw DimensionError("design matrix and target differ in row count");
  if (omegas.size() != lambdas.size()) throw DimensionError("need one smoothing parameter per penalty matrix");
  Eigen::MatrixXd m = detail::gram(a);
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (omegas[j].rows() != m.rows() || omegas[j].cols() != m.cols()) {
      throw DimensionError("penalty matrix " + std::to_string(j) + " has the wrong size");
    }
    if (lambdas[j] != 0.0) m += lambdas[j] * omegas[j];
  }
  return detail::solve_normal_equations(std::move(m), a.transpose() * y);
}

// --- full fit --------------------------------------------------------------

struct AlsResult {
  TensorTrain weights;
  SweepTrace trace;
};

namespace detail {

inline TensorTrain random_train(std::size_t d, std::size_t k, std::span<const std::size_t> ranks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DenseTensor> cores;
  std::size_t r_prev = 1;
  for (std::size_t p = 0; p < d; ++p) {
    const std::size_t r_next = p + 1 < d ? ranks[p] : 1;
    DenseTensor core({r_prev, k, r_next});
    const double scale = 1.0 / std::sqrt(static_cast<double>(r_prev * k));
    for (double& v : core.values()) v = scale * normal(rng);
    cores.push_back(std::move(core));
    r_prev = r_next;
  }
  return orthogonalize_to_site(TensorTrain(std::move(cores)), 0);
}

inline std::vector<Eigen::MatrixXd> select_rows(std::span<const Eigen::MatrixXd> basis,
                                                std::span<const std::size_t> rows) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(basis.size());
  for (const auto& b : basis) {
    Eigen::MatrixXd s(static_cast<Eigen::Index>(rows.size()), b.cols());
    for (std::size_t n = 0; n < rows.size(); ++n) s.row(static_cast<Eigen::Index>(n)) = b.row(static_cast<Eigen::Index>(rows[n]));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Fits the weights on precomputed scaled regressors (rows x d) and targets.
inline AlsResult als_fit_regressors(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const BasisConfig& basis,
                                    const FitConfig& cfg) {
  const auto d = static_cast<std::size_t>(x.cols());
  const std::size_t k = basis.basis_count();
  if (d == 0) throw ConfigError("need at least one regressor");
  cfg.validate(d, k);
  if (x.rows() != target.size()) throw DimensionError("regressor and target row counts differ");
  if (x.rows() < 2) throw InputError("too few samples to fit (" + std::to_string(x.rows()) + ")");
  if (!x.allFinite() || !target.allFinite()) throw InputError("training data contains non-finite values");

  SweepTrace trace;
  ClipCounter clips;
  std::vector<Eigen::MatrixXd> all_basis;
  all_basis.reserve(d);
  for (std::size_t p = 0; p < d; ++p) {
    const Eigen::VectorXd col = x.col(static_cast<Eigen::Index>(p));
    all_basis.push_back(basis_rows(basis, std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), &clips));
  }
  trace.clipped_inputs = clips.clipped;

  const auto n_total = static_cast<std::size_t>(x.rows());
  const bool batched = cfg.batch_size.has_value();
  const std::size_t batch = batched ? std::min(*cfg.batch_size, n_total) : n_total;
  std::seed_seq batch_seed{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 0x6261u};
  std::mt19937_64 batch_rng(batch_seed);
  std::vector<std::size_t> population(n_total);
  std::iota(population.begin(), population.end(), std::size_t{0});

  const Eigen::MatrixXd diff = difference_matrix(k, cfg.penalty_order);
  TensorTrain tt = detail::random_train(d, k, cfg.ranks, cfg.seed);

  std::vector<std::size_t> schedule;
  for (std::size_t p = 0; p + 1 < d; ++p) schedule.push_back(p);
  for (std::size_t p = d - 1; p >= 1; --p) schedule.push_back(p);
  if (d == 1) schedule.push_back(0);
  const std::size_t forward_steps = d - 1;

  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (std::size_t step = 0; step < schedule.size(); ++step) {
      const std::size_t p = schedule[step];

      std::vector<Eigen::MatrixXd> local_basis;
      Eigen::VectorXd local_target;
      std::span<const Eigen::MatrixXd> basis_view = all_basis;
      const Eigen::VectorXd* t = &target;
      if (batched) {
        std::vector<std::size_t> rows;
        rows.reserve(batch);
        std::sample(population.begin(), population.end(), std::back_inserter(rows), batch, batch_rng);
        std::sort(rows.begin(), rows.end());
        local_basis = detail::select_rows(all_basis, rows);
        local_target.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t n = 0; n < rows.size(); ++n) local_target(static_cast<Eigen::Index>(n)) = target(static_cast<Eigen::Index>(rows[n]));
        basis_view = local_basis;
        t = &local_target;
      }

      const Eigen::MatrixXd a = build_A(tt, basis_view, p);
      Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(a.cols(), a.cols());
      for (std::size_t j = 0; j < d; ++j) {
        if (cfg.lambdas[j] != 0.0) penalty += cfg.lambdas[j] * build_omega(tt, diff, p, j);
      }
      CoreSolution sol = detail::solve_normal_equations(detail::gram(a) + penalty, a.transpose() * *t);

      const DenseTensor& old = tt.core(p);
      tt = tt.with_core(p, core_from_matrix(sol.g, old.extent(0), old.extent(1), old.extent(2)), p);

      UpdateRecord rec;
      rec.sweep = sweep;
      rec.core = p;
      rec.residual = (*t - a * sol.g).squaredNorm();
      rec.penalty = sol.g.dot(penalty * sol.g);
      rec.objective = rec.residual + rec.penalty;
      rec.condition = sol.condition;
      rec.pseudo_inverse = sol.pseudo_inverse;
      if (!std::isfinite(rec.objective)) throw NumericalError("objective became non-finite during the sweep");
      trace.updates.push_back(rec);
      trace.pseudo_inverse_solves += sol.pseudo_inverse ? 1 : 0;
      trace.max_condition = std::max(trace.max_condition, sol.condition);
      if (step == 0) trace.first_core_objectives.push_back(rec.objective);

      if (d > 1) tt = shift_core(tt, p, step < forward_steps ? Direction::right : Direction::left);
    }
    trace.sweeps_run = sweep + 1;

    const auto& j = trace.first_core_objectives;
    if (j.size() >= 2 && std::abs(j[j.size() - 1] - j[j.size() - 2]) <= cfg.epsilon) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(tt), std::move(trace)};
}

struct FitResult {
  TnbsModel model;
  SweepTrace trace;
};

/**
 * Identifies a TNBS-NARX model. Scaling is fitted on (u, y) unless given;
 * pass Scaling::identity() for data already in model units.
 */
inline FitResult als_fit(std::span<const double> u, std::span<const double> y, const LagSpec& lags,
                         const BasisConfig& basis, const FitConfig& cfg,
                         std::optional<Scaling> scaling = std::nullopt) {
  lags.validate();
  const Scaling sc = scaling ? *scaling : fit_scaling(u, y);
  sc.validate();
  const Regressors reg = build_regressors(u, y, lags, sc);
  AlsResult res = als_fit_regressors(reg.x, reg.target, basis, cfg);
  return {TnbsModel(basis, lags, std::move(res.weights), sc), std::move(res.trace)};
}

// --- cross-validation ------------------------------------------------------

struct CrossValidation {
  std::vector<double> grid;
  std::size_t folds = 0;
  Eigen::MatrixXd scores;            // grid.size() x folds, held-out RMSE in original units
  std::vector<double> mean_scores;   // per grid value
  double best_lambda = 0.0;
};

/**
 * Chooses a broadcast smoothing parameter by contiguous-block cross-validation
 * on the lagged sample rows. Ties go to the larger lambda.
 */
inline CrossValidation cross_validate_lambda(std::span<const double> u, std::span<const double> y, const LagSpec& lags,
                                             const BasisConfig& basis, const FitConfig& cfg,
                                             std::span<const double> lambda_grid, std::size_t folds,
                                             std::optional<Scaling> scaling = std::nullopt) {
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  for (double l : lambda_grid) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda grid values must be finite and non-negative");
  }
  lags.validate();
  const Scaling sc = scaling ? *scaling : fit_scaling(u, y);
  const Regressors reg = build_regressors(u, y, lags, sc);
  const auto rows = static_cast<std::size_t>(reg.x.rows());
  if (folds > rows) {
    throw ConfigError(std::to_string(folds) + " folds exceed the " + std::to_string(rows) + " available samples");
  }
  const std::size_t d = lags.dimension();

  CrossValidation cv;
  cv.grid.assign(lambda_grid.begin(), lambda_grid.end());
  cv.folds = folds;
  cv.scores.resize(static_cast<Eigen::Index>(cv.grid.size()), static_cast<Eigen::Index>(folds));

  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t lo = f * rows / folds;
    const std::size_t hi = (f + 1) * rows / folds;
    const auto train_rows = static_cast<Eigen::Index>(rows - (hi - lo));
    Eigen::MatrixXd x_train(train_rows, reg.x.cols());
    Eigen::VectorXd t_train(train_rows);
    Eigen::Index w = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r >= lo && r < hi) continue;
      x_train.row(w) = reg.x.row(static_cast<Eigen::Index>(r));
      t_train(w++) = reg.target(static_cast<Eigen::Index>(r));
    }

    for (std::size_t g = 0; g < cv.grid.size(); ++g) {
      FitConfig local = cfg;
      local.lambdas.assign(d, cv.grid[g]);
      const AlsResult fit = als_fit_regressors(x_train, t_train, basis, local);

      std::vector<double> truth;
      std::vector<double> pred;
      std::vector<double> point(d);
      for (std::size_t r = lo; r < hi; ++r) {
        const auto re = static_cast<Eigen::Index>(r);
        for (std::size_t c = 0; c < d; ++c) point[c] = reg.x(re, static_cast<Eigen::Index>(c));
        truth.push_back(sc.descale_y(reg.target(re)));
        pred.push_back(sc.descale_y(eval_surface(basis, fit.weights, point)));
      }
      cv.scores(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(f)) = rmse(truth, pred);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < cv.grid.size(); ++g) {
    const double mean = cv.scores.row(static_cast<Eigen::Index>(g)).mean();
    cv.mean_scores.push_back(mean);
    if (mean < best || (mean == best && cv.grid[g] > cv.best_lambda)) {
      best = mean;
      cv.best_lambda = cv.grid[g];
    }
  }
  return cv;
}

}  // namespace tnbs

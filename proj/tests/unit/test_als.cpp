#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "tnbs/als.hpp"

namespace tnbs {
namespace {

using testing::random_tt;

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

Eigen::VectorXd vec_of(const DenseTensor& t) {
  return Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
}

Eigen::MatrixXd uniform_points(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
  return x;
}

std::vector<Eigen::MatrixXd> basis_per_dim(const BasisConfig& basis, const Eigen::MatrixXd& x) {
  std::vector<Eigen::MatrixXd> out;
  for (Eigen::Index p = 0; p < x.cols(); ++p) {
    const Eigen::VectorXd col = x.col(p);
    out.push_back(basis_rows(basis, std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))));
  }
  return out;
}

Eigen::VectorXd surface_values(const BasisConfig& basis, const TensorTrain& tt, const Eigen::MatrixXd& x) {
  Eigen::VectorXd out(x.rows());
  std::vector<double> pt(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index n = 0; n < x.rows(); ++n) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) pt[static_cast<std::size_t>(c)] = x(n, c);
    out(n) = eval_surface(basis, tt, pt);
  }
  return out;
}

TEST(DifferenceMatrix, FirstOrderWorkedExample) {
  Eigen::MatrixXd expected(2, 3);
  expected << 1, -1, 0, 0, 1, -1;
  EXPECT_EQ(difference_matrix(3, 1), expected);
}

TEST(DifferenceMatrix, ZeroOrderIsIdentity) { EXPECT_EQ(difference_matrix(5, 0), Eigen::MatrixXd::Identity(5, 5)); }

TEST(DifferenceMatrix, SecondOrder) {
  Eigen::MatrixXd expected(2, 4);
  expected << 1, -2, 1, 0, 0, 1, -2, 1;
  EXPECT_EQ(difference_matrix(4, 2), expected);
  EXPECT_THROW(difference_matrix(4, 4), ConfigError);
}

TEST(DensePenalty, ConstantTensorHasNoFirstDifferences) {
  const DenseTensor w({3, 4, 3}, std::vector<double>(36, 2.5));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(dense_penalty(w, difference_matrix(w.extent(j), 1), j), 0.0);
}

TEST(DensePenalty, VectorWorkedExample) {
  const DenseTensor w = DenseTensor::from_vector({1.0, 4.0, 2.0});
  EXPECT_DOUBLE_EQ(dense_penalty(w, difference_matrix(3, 1), 0), 9.0 + 4.0);
}

TEST(DensePenalty, MatchesSliceLoops) {
  std::mt19937_64 rng(51);
  const DenseTensor w = testing::random_tensor({3, 4, 3}, rng);
  for (std::size_t alpha : {0u, 1u, 2u}) {
    for (std::size_t j = 0; j < 3; ++j) {
      const Eigen::MatrixXd d = difference_matrix(w.extent(j), alpha);
      EXPECT_NEAR(dense_penalty(w, d, j), testing::penalty_loops(w, d, j), 1e-12);
    }
  }
  EXPECT_THROW(dense_penalty(w, difference_matrix(3, 1), 1), DimensionError);
}

TEST(BuildA, SingleDimensionIsBasisRows) {
  std::mt19937_64 rng(52);
  const BasisConfig basis = make_basis(2, 6);
  const TensorTrain tt = orthogonalize_to_site(random_tt({4}, {}, rng), 0);
  const auto rows = basis_per_dim(basis, uniform_points(15, 1, rng));
  EXPECT_EQ(build_A(tt, rows, 0), rows[0]);
}

TEST(BuildA, LinearInTheCanonicalCore) {
  std::mt19937_64 rng(53);
  const BasisConfig basis = make_basis(2, 6);
  const TensorTrain raw = random_tt({4, 4, 4}, {2, 3}, rng);
  const Eigen::MatrixXd x = uniform_points(10, 3, rng);
  const auto rows = basis_per_dim(basis, x);
  const Eigen::VectorXd expected = surface_values(basis, raw, x);
  for (std::size_t p = 0; p < 3; ++p) {
    const TensorTrain tt = orthogonalize_to_site(raw, p);
    const Eigen::MatrixXd a = build_A(tt, rows, p);
    EXPECT_EQ(a.cols(), static_cast<Eigen::Index>(tt.core(p).size()));
    EXPECT_LT((a * vec_of(tt.core(p)) - expected).cwiseAbs().maxCoeff(), 1e-10) << "p=" << p;
  }
}

TEST(BuildA, CascadedTanksInteriorColumnCount) {
  std::mt19937_64 rng(54);
  const BasisConfig basis = make_basis(3, 7);
  const TensorTrain tt = orthogonalize_to_site(random_tt(Shape(16, 4), std::vector<std::size_t>(15, 8), rng), 1);
  const auto rows = basis_per_dim(basis, uniform_points(5, 16, rng));
  EXPECT_EQ(build_A(tt, rows, 1).cols(), 256);
}

TEST(BuildA, RequiresCanonicalSite) {
  std::mt19937_64 rng(55);
  const BasisConfig basis = make_basis(2, 6);
  const TensorTrain tt = orthogonalize_to_site(random_tt({4, 4}, {2}, rng), 0);
  const auto rows = basis_per_dim(basis, uniform_points(5, 2, rng));
  EXPECT_THROW(build_A(tt, rows, 1), DimensionError);
  EXPECT_THROW(build_A(random_tt({4, 4}, {2}, rng), rows, 0), DimensionError);
}

TEST(BuildOmega, CanonicalCoreHasIdentityOuterFactors) {
  std::mt19937_64 rng(56);
  const TensorTrain tt = orthogonalize_to_site(random_tt({4, 4, 4}, {2, 3}, rng), 1);
  const Eigen::MatrixXd d = difference_matrix(4, 2);
  const Eigen::MatrixXd expected =
      testing::kron_loops(Eigen::MatrixXd::Identity(3, 3),
                          testing::kron_loops(d.transpose() * d, Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_LT((build_omega(tt, d, 1, 1) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BuildOmega, TikhonovOnCanonicalCoreIsSquaredNorm) {
  std::mt19937_64 rng(57);
  const TensorTrain tt = orthogonalize_to_site(random_tt({4, 4, 4}, {2, 2}, rng), 2);
  const Eigen::VectorXd g = vec_of(tt.core(2));
  const Eigen::MatrixXd omega = build_omega(tt, difference_matrix(4, 0), 2, 2);
  EXPECT_NEAR(g.dot(omega * g), g.squaredNorm(), 1e-12);
}

TEST(BuildOmega, MatchesDensePenaltyForEveryPair) {
  std::mt19937_64 rng(58);
  for (int inst = 0; inst < 5; ++inst) {
    const TensorTrain raw = random_tt({4, 4, 4}, {2, 2}, rng);
    const DenseTensor full = tt_to_full(raw);
    for (std::size_t alpha : {0u, 1u, 2u}) {
      const Eigen::MatrixXd d = difference_matrix(4, alpha);
      for (std::size_t p = 0; p < 3; ++p) {
        const TensorTrain tt = orthogonalize_to_site(raw, p);
        const Eigen::VectorXd g = vec_of(tt.core(p));
        for (std::size_t j = 0; j < 3; ++j) {
          const double expected = dense_penalty(full, d, j);
          EXPECT_NEAR(g.dot(build_omega(tt, d, p, j) * g), expected, 1e-9 * std::max(1.0, expected))
              << "p=" << p << " j=" << j << " alpha=" << alpha;
        }
      }
    }
  }
}

// Ranks larger than the unfoldings allow still give the exact penalty.
TEST(BuildOmega, ExactWithOversizedRanks) {
  std::mt19937_64 rng(59);
  const TensorTrain raw = random_tt({3, 3, 3, 3}, {5, 6, 5}, rng);
  const DenseTensor full = tt_to_full(raw);
  const Eigen::MatrixXd d = difference_matrix(3, 1);
  for (std::size_t p = 0; p < 4; ++p) {
    const TensorTrain tt = orthogonalize_to_site(raw, p);
    const Eigen::VectorXd g = vec_of(tt.core(p));
    for (std::size_t j = 0; j < 4; ++j) {
      const double expected = dense_penalty(full, d, j);
      EXPECT_NEAR(g.dot(build_omega(tt, d, p, j) * g), expected, 1e-9 * std::max(1.0, expected));
    }
  }
}

TEST(UpdateCore, UnregularizedSquareSystemIsExactSolve) {
  std::mt19937_64 rng(60);
  const Eigen::MatrixXd a = random_matrix(6, 6, rng) + 6.0 * Eigen::MatrixXd::Identity(6, 6);
  const Eigen::VectorXd y = random_matrix(6, 1, rng);
  const std::vector<Eigen::MatrixXd> omegas{Eigen::MatrixXd::Identity(6, 6)};
  const std::vector<double> lambdas{0.0};
  const CoreSolution sol = update_core(a, y, omegas, lambdas);
  EXPECT_LT((a * sol.g - y).norm(), 1e-10);
  EXPECT_FALSE(sol.pseudo_inverse);
}

TEST(UpdateCore, RidgeLimitShrinksMonotonically) {
  std::mt19937_64 rng(61);
  const Eigen::MatrixXd a = random_matrix(30, 8, rng);
  const Eigen::VectorXd y = random_matrix(30, 1, rng);
  const std::vector<Eigen::MatrixXd> omegas(3, Eigen::MatrixXd::Identity(8, 8));
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0, 1e4, 1e8}) {
    const std::vector<double> lambdas(3, lambda);
    const double n = update_core(a, y, omegas, lambdas).g.norm();
    EXPECT_LT(n, previous);
    previous = n;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(UpdateCore, MatchesExplicitInverseOracle) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd a = random_matrix(50, 24, rng);
    const Eigen::VectorXd y = random_matrix(50, 1, rng);
    const Eigen::MatrixXd d = difference_matrix(4, 1);
    std::vector<Eigen::MatrixXd> omegas;
    omegas.push_back(testing::kron_loops(Eigen::MatrixXd::Identity(3, 3),
                                         testing::kron_loops(d.transpose() * d, Eigen::MatrixXd::Identity(2, 2))));
    const Eigen::MatrixXd b = random_matrix(24, 24, rng);
    omegas.push_back(b.transpose() * b);
    const std::vector<double> lambdas{0.1, 0.1};
    const Eigen::MatrixXd m = a.transpose() * a + 0.1 * omegas[0] + 0.1 * omegas[1];
    const Eigen::VectorXd expected = m.inverse() * (a.transpose() * y);
    EXPECT_LT((update_core(a, y, omegas, lambdas).g - expected).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(UpdateCore, SingularSystemGivesMinimalNormSolution) {
  std::mt19937_64 rng(63);
  Eigen::MatrixXd a = random_matrix(20, 5, rng);
  a.col(4) = a.col(0) + a.col(1);
  const Eigen::VectorXd y = random_matrix(20, 1, rng);
  const std::vector<Eigen::MatrixXd> omegas{Eigen::MatrixXd::Identity(5, 5)};
  const std::vector<double> lambdas{0.0};
  const CoreSolution sol = update_core(a, y, omegas, lambdas);
  const Eigen::VectorXd expected = a.completeOrthogonalDecomposition().pseudoInverse() * y;
  EXPECT_TRUE(sol.pseudo_inverse);
  EXPECT_LT((sol.g - expected).norm(), 1e-8);
}

TEST(UpdateCore, RejectsBadShapesAndNonFinite) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  const std::vector<Eigen::MatrixXd> wrong{Eigen::MatrixXd::Identity(2, 2)};
  const std::vector<double> one{1.0};
  EXPECT_THROW(update_core(a, y, wrong, one), DimensionError);
  EXPECT_THROW(update_core(a, Eigen::VectorXd::Ones(4), {}, {}), DimensionError);
  Eigen::VectorXd bad = y;
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(update_core(a, bad, {}, {}), NumericalError);
}

TEST(FitConfig, Validation) {
  FitConfig cfg = make_fit_config(3, 2, 2, 0.1, 4, 0);
  EXPECT_NO_THROW(cfg.validate(3, 4));
  EXPECT_THROW(cfg.validate(4, 4), ConfigError);
  EXPECT_THROW(cfg.validate(3, 2), ConfigError);
  FitConfig neg = cfg;
  neg.lambdas[1] = -1.0;
  EXPECT_THROW(neg.validate(3, 4), ConfigError);
  FitConfig zero_rank = cfg;
  zero_rank.ranks[0] = 0;
  EXPECT_THROW(zero_rank.validate(3, 4), ConfigError);
  FitConfig no_sweeps = cfg;
  no_sweeps.max_sweeps = 0;
  EXPECT_THROW(no_sweeps.validate(3, 4), ConfigError);
  FitConfig empty_batch = cfg;
  empty_batch.batch_size = 0;
  EXPECT_THROW(empty_batch.validate(3, 4), ConfigError);
}

struct Problem {
  BasisConfig basis;
  TensorTrain truth;
  Eigen::MatrixXd x;
  Eigen::VectorXd t;
};

Problem exact_problem(std::size_t d, std::size_t rank, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Problem pr{make_basis(2, 6), random_tt(Shape(d, 4), std::vector<std::size_t>(d - 1, rank), rng), {}, {}};
  pr.x = uniform_points(n, static_cast<Eigen::Index>(d), rng);
  pr.t = surface_values(pr.basis, pr.truth, pr.x);
  return pr;
}

TEST(AlsFit, RecoversExactlyRepresentableSurface) {
  const Problem pr = exact_problem(3, 2, 2000, 64);
  FitConfig cfg = make_fit_config(3, 2, 2, 0.0, 16, 7);
  const AlsResult res = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  const Eigen::VectorXd fitted = surface_values(pr.basis, res.weights, pr.x);
  const double train_rmse = std::sqrt((fitted - pr.t).squaredNorm() / static_cast<double>(pr.t.size()));
  EXPECT_LT(train_rmse, 1e-4);
}

TEST(AlsFit, SingleDimensionMatchesPenalizedLeastSquares) {
  std::mt19937_64 rng(65);
  const BasisConfig basis = make_basis(3, 10);
  const Eigen::MatrixXd x = uniform_points(200, 1, rng);
  Eigen::VectorXd t(200);
  for (Eigen::Index n = 0; n < 200; ++n) t(n) = std::sin(6.0 * x(n, 0));
  FitConfig cfg = make_fit_config(1, 1, 2, 0.5, 3, 1);
  const AlsResult res = als_fit_regressors(x, t, basis, cfg);
  const Eigen::MatrixXd b = basis_rows(basis, std::span<const double>(x.data(), 200));
  const Eigen::MatrixXd d = difference_matrix(7, 2);
  const Eigen::VectorXd expected = (b.transpose() * b + 0.5 * d.transpose() * d).inverse() * (b.transpose() * t);
  EXPECT_LT((vec_of(res.weights.core(0)) - expected).cwiseAbs().maxCoeff(), 1e-9);
}

class Monotonicity : public ::testing::TestWithParam<int> {};

// Random problems: dimension, ranks, penalty and noise vary with the seed.
TEST_P(Monotonicity, ObjectiveNeverIncreases) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  std::mt19937_64 rng(1000 + seed);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
  const std::size_t rank = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  Problem pr = exact_problem(d, 2, 300, 2000 + seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (Eigen::Index n = 0; n < pr.t.size(); ++n) pr.t(n) += noise(rng);
  const double lambda = std::array{0.0, 1e-3, 0.1, 10.0}[seed % 4];
  FitConfig cfg = make_fit_config(d, rank, seed % 3, lambda, 6, seed);
  const AlsResult res = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  const auto& up = res.trace.updates;
  ASSERT_EQ(up.size(), res.trace.sweeps_run * (2 * d - 2));
  for (std::size_t i = 1; i < up.size(); ++i) {
    EXPECT_LE(up[i].objective, up[i - 1].objective + 1e-9) << "update " << i;
  }
  for (std::size_t h = 1; h < res.trace.first_core_objectives.size(); ++h) {
    EXPECT_LE(res.trace.first_core_objectives[h], res.trace.first_core_objectives[h - 1] + 1e-9);
  }
  // The recorded objective is the full penalized cost of the final tensor.
  const DenseTensor w = tt_to_full(res.weights);
  const Eigen::VectorXd resid = surface_values(pr.basis, res.weights, pr.x) - pr.t;
  double expected = resid.squaredNorm();
  for (std::size_t j = 0; j < d; ++j) expected += lambda * dense_penalty(w, difference_matrix(4, seed % 3), j);
  EXPECT_NEAR(up.back().objective, expected, 1e-8 * std::max(1.0, expected));
}

INSTANTIATE_TEST_SUITE_P(RandomInstances, Monotonicity, ::testing::Range(0, 20));

TEST(AlsFit, StopsWhenFirstCoreObjectiveSettles) {
  const Problem pr = exact_problem(3, 2, 300, 66);
  FitConfig cfg = make_fit_config(3, 2, 1, 0.0, 50, 3);
  cfg.epsilon = 1e300;
  const AlsResult loose = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  EXPECT_EQ(loose.trace.sweeps_run, 2u);
  EXPECT_TRUE(loose.trace.converged);
  EXPECT_EQ(loose.trace.first_core_objectives.size(), 2u);

  cfg.epsilon = 0.0;
  cfg.max_sweeps = 4;
  const AlsResult capped = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  EXPECT_EQ(capped.trace.sweeps_run, 4u);
  EXPECT_EQ(capped.trace.first_core_objectives.size(), 4u);
  const auto& j = capped.trace.first_core_objectives;
  for (std::size_t h = 1; h < j.size(); ++h) {
    if (std::abs(j[h] - j[h - 1]) <= cfg.epsilon) EXPECT_TRUE(capped.trace.converged);
  }
}

TEST(AlsFit, SweepScheduleAndFinalCanonicity) {
  const Problem pr = exact_problem(4, 2, 200, 67);
  const AlsResult res = als_fit_regressors(pr.x, pr.t, pr.basis, make_fit_config(4, 2, 1, 0.01, 2, 4));
  std::vector<std::size_t> cores;
  for (const auto& u : res.trace.updates) cores.push_back(u.core);
  EXPECT_EQ(cores, (std::vector<std::size_t>{0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1}));
  EXPECT_EQ(res.weights.canonical_site(), std::optional<std::size_t>(0));
  for (std::size_t p = 1; p < 4; ++p) EXPECT_TRUE(is_right_orthogonal(res.weights.core(p)));
}

TEST(AlsFit, SeededRunsAreBitIdentical) {
  const Problem pr = exact_problem(3, 2, 300, 68);
  const FitConfig cfg = make_fit_config(3, 3, 2, 0.01, 4, 99);
  const AlsResult a = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  const AlsResult b = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  ASSERT_EQ(a.trace.updates.size(), b.trace.updates.size());
  for (std::size_t i = 0; i < a.trace.updates.size(); ++i) EXPECT_EQ(a.trace.updates[i].objective, b.trace.updates[i].objective);
  EXPECT_EQ(a.weights, b.weights);
}

TEST(AlsFit, FullBatchEqualsUnbatched) {
  const Problem pr = exact_problem(3, 2, 250, 69);
  FitConfig cfg = make_fit_config(3, 2, 1, 0.01, 3, 5);
  const AlsResult plain = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  cfg.batch_size = 250;
  const AlsResult batched = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  EXPECT_EQ(plain.weights, batched.weights);
  cfg.batch_size = 60;
  const AlsResult small = als_fit_regressors(pr.x, pr.t, pr.basis, cfg);
  EXPECT_EQ(small.weights.ranks(), plain.weights.ranks());
  EXPECT_NE(small.weights, plain.weights);
}

TEST(AlsFit, CountsClippedInputsAndRejectsBadData) {
  Problem pr = exact_problem(2, 2, 100, 70);
  pr.x(3, 0) = 1.5;
  pr.x(7, 1) = -0.2;
  const FitConfig cfg = make_fit_config(2, 2, 1, 0.0, 1, 0);
  EXPECT_EQ(als_fit_regressors(pr.x, pr.t, pr.basis, cfg).trace.clipped_inputs, 2u);
  Eigen::VectorXd bad = pr.t;
  bad(0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(als_fit_regressors(pr.x, bad, pr.basis, cfg), InputError);
  EXPECT_THROW(als_fit_regressors(pr.x.topRows(1), pr.t.head(1), pr.basis, cfg), InputError);
}

TEST(AlsFit, SignalInterfaceCarriesScalingAndLags) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(400), y(400, 0.0);
  for (double& v : u) v = 10.0 * unit(rng);
  for (std::size_t n = 1; n < 400; ++n) y[n] = 0.5 * y[n - 1] + std::sin(0.3 * u[n - 1]);
  const LagSpec lags = make_lag_spec({1}, {1});
  const FitResult fit = als_fit(u, y, lags, make_basis(3, 9), make_fit_config(2, 3, 2, 1e-4, 6, 0));
  EXPECT_EQ(fit.model.lags(), lags);
  EXPECT_EQ(fit.model.scaling(), fit_scaling(u, y));
  const Signal p = predict(fit.model, u, y);
  EXPECT_LT(rmse(std::span<const double>(y).subspan(1), p), 0.01);
  EXPECT_THROW(als_fit(u, std::vector<double>(400, 1.0), lags, make_basis(3, 9), make_fit_config(2, 3, 2, 0, 2, 0)),
               InputError);
}

TEST(CrossValidate, SingleValueGridIsReturned) {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(120), y(120);
  for (std::size_t i = 0; i < 120; ++i) {
    u[i] = unit(rng);
    y[i] = unit(rng);
  }
  const std::vector<double> grid{0.3};
  const CrossValidation cv = cross_validate_lambda(u, y, make_lag_spec({1}, {1}), make_basis(1, 4),
                                                   make_fit_config(2, 2, 1, 0, 2, 0), grid, 3);
  EXPECT_EQ(cv.best_lambda, 0.3);
  EXPECT_EQ(cv.scores.rows(), 1);
  EXPECT_EQ(cv.scores.cols(), 3);
}

TEST(CrossValidate, NoiselessDataPrefersNoPenalty) {
  const Problem pr = exact_problem(2, 2, 600, 73);
  // Static map: u at lag 0 and 1 as the two regressors, y the surface.
  std::vector<double> u(601), y(601, 0.0);
  u[0] = pr.x(0, 1);
  for (Eigen::Index n = 0; n < 600; ++n) u[static_cast<std::size_t>(n) + 1] = pr.x(n, 0);
  std::vector<double> pt(2);
  for (std::size_t n = 1; n < 601; ++n) {
    pt = {u[n], u[n - 1]};
    y[n] = eval_surface(pr.basis, pr.truth, pt);
  }
  const std::vector<double> grid{0.0, 1e6};
  const CrossValidation cv = cross_validate_lambda(u, y, make_lag_spec({0, 1}, {}), pr.basis,
                                                   make_fit_config(2, 2, 2, 0, 8, 1), grid, 3, Scaling::identity());
  EXPECT_EQ(cv.best_lambda, 0.0);
  EXPECT_LT(cv.mean_scores[0], cv.mean_scores[1]);
}

TEST(CrossValidate, ErrorPaths) {
  const std::vector<double> u(20, 0.0), y(20, 0.0);
  const LagSpec lags = make_lag_spec({1}, {});
  const BasisConfig basis = make_basis(1, 4);
  const FitConfig cfg = make_fit_config(1, 1, 1, 0, 1, 0);
  const Scaling id = Scaling::identity();
  EXPECT_THROW(cross_validate_lambda(u, y, lags, basis, cfg, std::vector<double>{}, 3, id), ConfigError);
  EXPECT_THROW(cross_validate_lambda(u, y, lags, basis, cfg, std::vector<double>{0.1}, 1, id), ConfigError);
  EXPECT_THROW(cross_validate_lambda(u, y, lags, basis, cfg, std::vector<double>{0.1}, 50, id), ConfigError);
}

}  // namespace
}  // namespace tnbs

/**
 * @file synth.hpp
 * @brief Synthetic NARX systems that are exactly representable as TNBS models.
 *
 * A random two-valued weight tensor is compressed with a truncated TT-SVD and
 * used as the true system. The excitation is a smoothed uniform sequence and
 * the output is generated recursively from zero initial conditions, all in
 * model units (identity scaling). Every random draw derives from one seed.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tnbs/bspline.hpp"
#include "tnbs/dense_tensor.hpp"
#include "tnbs/error.hpp"
#include "tnbs/model.hpp"
#include "tnbs/tensor_train.hpp"

namespace tnbs {

/// Standard deviation (in samples) of the input smoothing window.
inline constexpr double kSmoothingSigma = 1.0;

struct SynthSpec {
  LagSpec lags{{1, 2, 3, 4}, {1, 2, 3, 4}};
  int degree = 2;
  int knot_param = 6;
  std::size_t rank = 5;
  double w_min = -4.0;
  double w_max = 5.0;
  std::size_t length = 3000;
  std::size_t train_length = 2000;
  std::size_t window = 5;
  std::uint64_t seed = 0;

  void validate() const {
    lags.validate();
    (void)make_basis(degree, knot_param);
    if (rank == 0) throw ConfigError("synthetic TT-rank must be positive");
    if (window == 0 || window % 2 == 0) throw ConfigError("smoothing window length must be odd and positive");
    if (length < window) throw ConfigError("signal length must be at least the window length");
    if (train_length == 0 || train_length >= length) {
      throw ConfigError("estimation length must be positive and below the total length");
    }
    if (length <= lags.first_index()) throw ConfigError("signal too short for the lag structure");
  }
};

namespace detail {

enum class SynthStream : std::uint32_t { weights = 1, input = 2, noise = 3 };

inline std::mt19937_64 stream_rng(std::uint64_t seed, SynthStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Random w_min/w_max tensor of shape k^d compressed to the configured rank.
inline TensorTrain generate_true_weights(const SynthSpec& spec, std::size_t cap = kDenseElementCap) {
  spec.validate();
  const std::size_t d = spec.lags.dimension();
  const auto k = static_cast<std::size_t>(spec.knot_param - spec.degree);
  std::size_t total = 1;
  for (std::size_t p = 0; p < d; ++p) {
    if (total > cap / k) throw DimensionError("dense weight tensor exceeds the element cap of " + std::to_string(cap));
    total *= k;
  }

  auto rng = detail::stream_rng(spec.seed, detail::SynthStream::weights);
  std::bernoulli_distribution coin(0.5);
  DenseTensor w(Shape(d, k));
  for (double& v : w.values()) v = coin(rng) ? spec.w_max : spec.w_min;

  const std::vector<std::size_t> ranks(d - 1, spec.rank);
  return tt_svd(w, ranks);
}

/// Unit-sum Gaussian window of odd length.
inline std::vector<double> gaussian_window(std::size_t length, double sigma = kSmoothingSigma) {
  if (length == 0 || length % 2 == 0) throw ConfigError("window length must be odd and positive");
  std::vector<double> w(length);
  const double c = static_cast<double>(length / 2);
  double sum = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double z = (static_cast<double>(i) - c) / sigma;
    w[i] = std::exp(-0.5 * z * z);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

/// Uniform [0,1] noise smoothed by a Gaussian window (symmetric edge padding), clipped to [0,1].
inline Signal generate_input(std::size_t n, std::size_t window, std::uint64_t seed) {
  if (window == 0 || window % 2 == 0) throw ConfigError("smoothing window length must be odd and positive");
  if (n < window) throw ConfigError("signal length must be at least the window length");
  auto rng = detail::stream_rng(seed, detail::SynthStream::input);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Signal raw(n);
  for (double& v : raw) v = uniform(rng);
  if (window == 1) return raw;

  const std::vector<double> w = gaussian_window(window);
  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto len = static_cast<std::ptrdiff_t>(n);
  auto reflect = [len](std::ptrdiff_t i) {
    if (i < 0) return -i - 1;
    if (i >= len) return 2 * len - i - 1;
    return i;
  };
  Signal out(n);
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t j = -half; j <= half; ++j) s += w[static_cast<std::size_t>(j + half)] * raw[static_cast<std::size_t>(reflect(i + j))];
    out[static_cast<std::size_t>(i)] = std::clamp(s, 0.0, 1.0);
  }
  return out;
}

/// Recursive output of the true system from `warmup_zeros` zero samples.
inline Signal generate_output(const TnbsModel& truth, std::span<const double> u, std::size_t warmup_zeros) {
  const LagSpec& lags = truth.lags();
  if (warmup_zeros < lags.first_index()) {
    throw ConfigError("need at least " + std::to_string(lags.first_index()) + " zero warm-up samples");
  }
  if (u.size() < warmup_zeros) throw InputError("input shorter than the warm-up");
  Signal y(u.size(), 0.0);
  std::vector<double> x(lags.dimension());
  const Scaling& sc = truth.scaling();
  for (std::size_t n = warmup_zeros; n < u.size(); ++n) {
    std::size_t c = 0;
    for (std::size_t lag : lags.input_lags) x[c++] = sc.apply_u(u[n - lag]);
    for (std::size_t lag : lags.output_lags) x[c++] = sc.apply_y(y[n - lag]);
    y[n] = sc.descale_y(eval_surface(truth, x));
  }
  return y;
}

/// Adds white Gaussian noise at the given SNR (dB) relative to the mean-removed signal power.
inline Signal add_noise(std::span<const double> y, double snr_db, std::uint64_t seed) {
  if (y.empty()) throw InputError("cannot add noise to an empty signal");
  if (std::isnan(snr_db)) throw ConfigError("SNR must not be NaN");
  Signal out(y.begin(), y.end());
  if (snr_db == std::numeric_limits<double>::infinity()) return out;

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double power = 0.0;
  for (double v : y) power += (v - mean) * (v - mean);
  power /= static_cast<double>(y.size());

  const double variance = power / std::pow(10.0, snr_db / 10.0);
  auto rng = detail::stream_rng(seed, detail::SynthStream::noise);
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (double& v : out) v += normal(rng);
  return out;
}

struct SynthDataset {
  TnbsModel truth;
  Signal u;
  Signal y_clean;
  Signal y_estimation;  // noisy estimation part
  std::size_t train_length = 0;

  std::span<const double> u_train() const { return std::span<const double>(u).first(train_length); }
  std::span<const double> y_train() const { return std::span<const double>(y_estimation); }
  std::span<const double> u_test() const { return std::span<const double>(u).subspan(train_length); }
  std::span<const double> y_test() const { return std::span<const double>(y_clean).subspan(train_length); }
};

/// Full synthetic protocol: true system, excitation, response and estimation noise.
inline SynthDataset make_synthetic_dataset(const SynthSpec& spec, double snr_db) {
  spec.validate();
  TnbsModel truth(make_basis(spec.degree, spec.knot_param), spec.lags, generate_true_weights(spec),
                  Scaling::identity());
  Signal u = generate_input(spec.length, spec.window, spec.seed);
  Signal y = generate_output(truth, u, spec.lags.first_index());
  Signal y_est = add_noise(std::span<const double>(y).first(spec.train_length), snr_db, spec.seed);
  return {std::move(truth), std::move(u), std::move(y), std::move(y_est), spec.train_length};
}

}  // namespace tnbs

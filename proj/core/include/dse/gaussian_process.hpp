// Copyright 2026 The dse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DSE_GAUSSIAN_PROCESS_HPP_
#define DSE_GAUSSIAN_PROCESS_HPP_

#include <cstddef>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Cholesky>

namespace dse {

struct GpHyper {
  double signal_var = 1.0;   // s^2
  double length_scale = 1.0; // l
  double noise_var = 1e-6;   // sigma_n^2
};

struct GpPrediction {
  double mean = 0;
  double variance = 0;  // latent (noise-free) posterior variance
};

inline constexpr double kGpJitter = 1e-8;

// Exact GP regression with a squared-exponential kernel
//   k(x, x') = s^2 exp(-|x - x'|^2 / (2 l^2)) + sigma_n^2 [same observation]
// and a constant prior mean, by default the training mean. Inputs enter only
// through squared distances, so callers with structured inputs can supply
// them directly.
class GaussianProcess {
 public:
  // Hyperparameters chosen by maximizing the log marginal likelihood over
  // l in {0.1,0.3,1,3,10}, s^2 in {0.01..100}*var(y), sigma_n^2 in
  // {1e-6..1}*var(y). `sq_dists` is the n x n matrix of squared distances.
  static GaussianProcess fit(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                             std::optional<double> prior_mean = std::nullopt);
  // Fixed hyperparameters. Throws NumericalError if the kernel stays
  // non-positive-definite after raising the jitter 10x three times.
  static GaussianProcess fit_fixed(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                                   const GpHyper& hyper,
                                   std::optional<double> prior_mean = std::nullopt);

  // Convenience for vector inputs (rows of x) with Euclidean distances.
  static GaussianProcess fit_points(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
  GpPrediction predict_point(const Eigen::MatrixXd& x_train, const Eigen::VectorXd& x) const;

  // `sq_dists_to_train` holds |x - x_i|^2 for every training point i.
  GpPrediction predict_sq(const Eigen::VectorXd& sq_dists_to_train) const;

  const GpHyper& hyper() const { return hyper_; }
  double prior_mean() const { return prior_mean_; }
  double log_marginal_likelihood() const { return lml_; }
  std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }
  double jitter() const { return jitter_; }

 private:
  GpHyper hyper_;
  double prior_mean_ = 0;
  double lml_ = 0;
  double jitter_ = kGpJitter;
  Eigen::MatrixXd chol_l_;  // lower Cholesky factor of K + (noise + jitter) I
  Eigen::VectorXd alpha_;   // K^-1 (y - m)
};

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& x);
Eigen::VectorXd sq_dists_to(const Eigen::MatrixXd& x, const Eigen::VectorXd& point);

// Two-level stack for transfer: a base GP on source data and a GP on the
// target residuals y - base_mean(x). Mean adds, variance is the residual's.
// Without target data it is the base GP; without source data it is a plain
// GP on the target.
class StackedGaussianProcess {
 public:
  void fit_base(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y);
  // `base_means` = base mean at each target point (ignored without a base).
  void fit_target(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& base_means);
  void fit_target_fixed(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& base_means, const GpHyper& hyper);
  void clear_target() { target_.reset(); }

  bool has_base() const { return base_.has_value(); }
  bool has_target() const { return target_.has_value(); }
  const std::optional<GaussianProcess>& base() const { return base_; }
  const std::optional<GaussianProcess>& target() const { return target_; }

  double base_mean(const Eigen::VectorXd& sq_to_base) const;
  GpPrediction predict_sq(const Eigen::VectorXd& sq_to_base, const Eigen::VectorXd& sq_to_target) const;

 private:
  std::optional<GaussianProcess> base_;
  std::optional<GaussianProcess> target_;
};

}  // namespace dse

#endif  // DSE_GAUSSIAN_PROCESS_HPP_

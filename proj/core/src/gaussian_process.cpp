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

#include "dse/gaussian_process.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dse/error.hpp"

namespace dse {
namespace {

constexpr std::array<double, 5> kLengthScales = {0.1, 0.3, 1.0, 3.0, 10.0};
constexpr std::array<double, 5> kSignalScales = {0.01, 0.1, 1.0, 10.0, 100.0};
constexpr std::array<double, 5> kNoiseScales = {1e-6, 1e-4, 1e-2, 1e-1, 1.0};

struct Factor {
  Eigen::MatrixXd l;
  double jitter;
};

// Cholesky of s^2 E + (noise + jitter) I, escalating the jitter on failure.
std::optional<Factor> factorize(const Eigen::MatrixXd& expo, const GpHyper& h) {
  double jitter = kGpJitter;
  for (int attempt = 0; attempt <= 3; ++attempt, jitter *= 10) {
    Eigen::MatrixXd k = h.signal_var * expo;
    k.diagonal().array() += h.noise_var + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) return Factor{llt.matrixL(), jitter};
  }
  return std::nullopt;
}

double centered_variance(const Eigen::VectorXd& y) {
  if (y.size() < 2) return 1.0;
  const double m = y.mean();
  const double v = (y.array() - m).square().sum() / static_cast<double>(y.size());
  return v > 0 ? v : 1.0;
}

}  // namespace

GaussianProcess GaussianProcess::fit_fixed(const Eigen::MatrixXd& sq_dists,
                                           const Eigen::VectorXd& y, const GpHyper& hyper,
                                           std::optional<double> prior_mean) {
  if (y.size() == 0 || sq_dists.rows() != y.size() || sq_dists.cols() != y.size())
    throw ValidationError("gp: distance matrix and targets disagree in size");
  const Eigen::MatrixXd expo = (-sq_dists.array() / (2.0 * hyper.length_scale * hyper.length_scale)).exp();
  auto f = factorize(expo, hyper);
  if (!f) throw NumericalError("gp: kernel matrix not positive definite after jitter escalation");
  GaussianProcess gp;
  gp.hyper_ = hyper;
  gp.prior_mean_ = prior_mean.value_or(y.mean());
  gp.jitter_ = f->jitter;
  gp.chol_l_ = std::move(f->l);
  const Eigen::VectorXd centered = y.array() - gp.prior_mean_;
  const Eigen::VectorXd half = gp.chol_l_.triangularView<Eigen::Lower>().solve(centered);
  gp.alpha_ = gp.chol_l_.transpose().triangularView<Eigen::Upper>().solve(half);
  const double n = static_cast<double>(y.size());
  gp.lml_ = -0.5 * centered.dot(gp.alpha_) - gp.chol_l_.diagonal().array().log().sum() -
            0.5 * n * std::log(2.0 * std::numbers::pi);
  return gp;
}

GaussianProcess GaussianProcess::fit(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                                     std::optional<double> prior_mean) {
  if (y.size() == 0 || sq_dists.rows() != y.size())
    throw ValidationError("gp: distance matrix and targets disagree in size");
  const double var = centered_variance(y);
  const Eigen::VectorXd centered = y.array() - prior_mean.value_or(y.mean());
  const double n = static_cast<double>(y.size());

  GpHyper best_h;
  double best_lml = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (double ls : kLengthScales) {
    const Eigen::MatrixXd expo = (-sq_dists.array() / (2.0 * ls * ls)).exp();
    for (double ss : kSignalScales) {
      for (double ns : kNoiseScales) {
        const GpHyper h{ss * var, ls, ns * var};
        auto f = factorize(expo, h);
        if (!f) continue;
        const auto l = f->l.triangularView<Eigen::Lower>();
        const Eigen::VectorXd v = l.solve(centered);
        const double lml = -0.5 * v.squaredNorm() - f->l.diagonal().array().log().sum() -
                           0.5 * n * std::log(2.0 * std::numbers::pi);
        if (lml > best_lml) {
          best_lml = lml;
          best_h = h;
          any = true;
        }
      }
    }
  }
  if (!any) throw NumericalError("gp: no hyperparameter setting gave a positive-definite kernel");
  return fit_fixed(sq_dists, y, best_h, prior_mean);
}

GaussianProcess GaussianProcess::fit_points(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return fit(pairwise_sq_dists(x), y);
}

GpPrediction GaussianProcess::predict_point(const Eigen::MatrixXd& x_train,
                                            const Eigen::VectorXd& x) const {
  return predict_sq(sq_dists_to(x_train, x));
}

GpPrediction GaussianProcess::predict_sq(const Eigen::VectorXd& sq_dists_to_train) const {
  const double inv = 1.0 / (2.0 * hyper_.length_scale * hyper_.length_scale);
  const Eigen::VectorXd k = hyper_.signal_var * (-sq_dists_to_train.array() * inv).exp();
  GpPrediction p;
  p.mean = prior_mean_ + k.dot(alpha_);
  const Eigen::VectorXd v = chol_l_.triangularView<Eigen::Lower>().solve(k);
  p.variance = std::max(0.0, hyper_.signal_var - v.squaredNorm());
  return p;
}

Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& x) {
  const auto n = x.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  return d;
}

Eigen::VectorXd sq_dists_to(const Eigen::MatrixXd& x, const Eigen::VectorXd& point) {
  Eigen::VectorXd d(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) d(i) = (x.row(i).transpose() - point).squaredNorm();
  return d;
}

void StackedGaussianProcess::fit_base(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y) {
  base_ = GaussianProcess::fit(sq_dists, y);
}

void StackedGaussianProcess::fit_target(const Eigen::MatrixXd& sq_dists, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& base_means) {
  const Eigen::VectorXd r = base_ ? Eigen::VectorXd(y - base_means) : y;
  target_ = GaussianProcess::fit(sq_dists, r);
}

void StackedGaussianProcess::fit_target_fixed(const Eigen::MatrixXd& sq_dists,
                                              const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& base_means,
                                              const GpHyper& hyper) {
  const Eigen::VectorXd r = base_ ? Eigen::VectorXd(y - base_means) : y;
  target_ = GaussianProcess::fit_fixed(sq_dists, r, hyper);
}

double StackedGaussianProcess::base_mean(const Eigen::VectorXd& sq_to_base) const {
  return base_ ? base_->predict_sq(sq_to_base).mean : 0.0;
}

GpPrediction StackedGaussianProcess::predict_sq(const Eigen::VectorXd& sq_to_base,
                                                const Eigen::VectorXd& sq_to_target) const {
  if (!target_) {
    if (!base_) throw ValidationError("stacked gp: nothing fitted");
    return base_->predict_sq(sq_to_base);
  }
  GpPrediction p = target_->predict_sq(sq_to_target);
  if (base_) p.mean += base_->predict_sq(sq_to_base).mean;
  return p;
}

}  // namespace dse

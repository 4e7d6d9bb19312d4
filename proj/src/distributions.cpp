// Copyright 2026 The mbsarma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mbsarma/distributions.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "mbsarma/errors.hpp"

namespace mbsarma {

namespace {

void require_bs(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("BS shape alpha must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("BS scale beta must be positive and finite");
  }
}

void require_logbs(const LogBsParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
    throw std::domain_error("log-BS shape alpha must be positive and finite");
  }
  if (!std::isfinite(p.mu)) {
    throw std::domain_error("log-BS location mu must be finite");
  }
}

void require_dim(Eigen::Index got, const MvLogBsParams& p) {
  if (got != p.mu.size()) {
    throw std::invalid_argument("dimension mismatch: vector of length " +
                                std::to_string(got) + ", model dimension " +
                                std::to_string(p.mu.size()));
  }
}

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

}  // namespace

CholeskyFactor::CholeskyFactor(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw std::invalid_argument("Cholesky factor needs a nonempty square matrix");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(matrix);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("matrix is not positive definite");
  }
  lower_ = llt.matrixL();
  for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
    const double pivot = lower_(i, i);
    if (!(pivot >= kMinCholeskyPivot) || !std::isfinite(pivot)) {
      throw NotPositiveDefinite("matrix is numerically singular (Cholesky pivot " +
                                std::to_string(pivot) + ")");
    }
    log_det_ += 2.0 * std::log(pivot);
  }
}

double CholeskyFactor::quad_form(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd w = lower_.triangularView<Eigen::Lower>().solve(x);
  return w.squaredNorm();
}

Eigen::VectorXd CholeskyFactor::solve(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd w = lower_.triangularView<Eigen::Lower>().solve(x);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(w);
  return w;
}

Eigen::MatrixXd CholeskyFactor::inverse() const {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim(), dim());
  lower_.triangularView<Eigen::Lower>().solveInPlace(id);
  lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(id);
  return id;
}

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double bs_pdf(double t, const BsParams& p) {
  require_bs(p.alpha, p.beta);
  if (!(t > 0.0)) throw std::domain_error("bs_pdf requires t > 0");
  const double ratio = p.beta / t;
  const double log_bracket = std::log(std::sqrt(ratio) + ratio * std::sqrt(ratio));
  const double log_norm =
      -std::log(2.0 * p.alpha * p.beta) - kLogSqrt2Pi;
  const double expo = -(t / p.beta + ratio - 2.0) / (2.0 * p.alpha * p.alpha);
  return std::exp(log_norm + log_bracket + expo);
}

double bs_cdf(double t, const BsParams& p) {
  require_bs(p.alpha, p.beta);
  if (!(t > 0.0)) throw std::domain_error("bs_cdf requires t > 0");
  const double z = (std::sqrt(t / p.beta) - std::sqrt(p.beta / t)) / p.alpha;
  return standard_normal_cdf(z);
}

double logbs_logpdf(double y, const LogBsParams& p) {
  require_logbs(p);
  const double h = 0.5 * (y - p.mu);
  const double sh = std::sinh(h);
  return -std::log(p.alpha) - kLogSqrt2Pi - 2.0 * sh * sh / (p.alpha * p.alpha) +
         log_cosh(h);
}

double logbs_pdf(double y, const LogBsParams& p) {
  return std::exp(logbs_logpdf(y, p));
}

double logbs_cdf(double y, const LogBsParams& p) {
  require_logbs(p);
  return standard_normal_cdf(2.0 / p.alpha * std::sinh(0.5 * (y - p.mu)));
}

double logbs_quantile(double prob, const LogBsParams& p) {
  require_logbs(p);
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("logbs_quantile requires 0 < prob < 1");
  }
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, prob);
  return p.mu + 2.0 * std::asinh(p.alpha * z / 2.0);
}

void validate(const MvLogBsParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
    throw std::domain_error("shape alpha must be positive and finite");
  }
  const Eigen::Index d = p.mu.size();
  if (p.psi.rows() != d || p.psi.cols() != d) {
    throw std::invalid_argument("psi must be d x d with d = length of mu");
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    if (p.psi(j, j) != 1.0) {
      throw std::domain_error("psi must have unit diagonal");
    }
    for (Eigen::Index k = 0; k < j; ++k) {
      if (std::abs(p.psi(j, k) - p.psi(k, j)) > 1e-12) {
        throw std::domain_error("psi must be symmetric");
      }
    }
  }
}

Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const MvLogBsParams& p) {
  require_dim(y.size(), p);
  Eigen::VectorXd a(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    a[j] = 2.0 / p.alpha * std::sinh(0.5 * (y[j] - p.mu[j]));
  }
  return a;
}

Eigen::VectorXd destandardize(const Eigen::Ref<const Eigen::VectorXd>& z,
                              const MvLogBsParams& p) {
  require_dim(z.size(), p);
  Eigen::VectorXd y(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    y[j] = p.mu[j] + 2.0 * std::asinh(0.5 * p.alpha * z[j]);
  }
  return y;
}

double mvlogbs_logpdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const MvLogBsParams& p) {
  validate(p);
  require_dim(y.size(), p);
  const CholeskyFactor factor(p.psi);
  const auto d = static_cast<double>(y.size());
  const Eigen::VectorXd a = standardize(y, p);
  double sum_log_c = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    sum_log_c += std::log(2.0 / p.alpha) + log_cosh(0.5 * (y[j] - p.mu[j]));
  }
  return sum_log_c - d * kLogSqrt2Pi - d * std::numbers::ln2 -
         0.5 * factor.log_det() - 0.5 * factor.quad_form(a);
}

Eigen::MatrixXd sample_mvlogbs(std::size_t count, const MvLogBsParams& p,
                               std::uint64_t seed) {
  validate(p);
  const CholeskyFactor factor(p.psi);
  const Eigen::Index d = p.mu.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), d);
  Eigen::VectorXd e(d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) e[j] = normal(rng);
    const Eigen::VectorXd z = factor.lower() * e;
    out.row(i) = destandardize(z, p).transpose();
  }
  return out;
}

}  // namespace mbsarma

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

#ifndef MBSARMA_DISTRIBUTIONS_HPP_
#define MBSARMA_DISTRIBUTIONS_HPP_

#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace mbsarma {

// Birnbaum-Saunders law BS(alpha, beta); beta is the median.
struct BsParams {
  double alpha = 1.0;
  double beta = 1.0;
};

// Law of log(T) for T ~ BS(alpha, exp(mu)).
struct LogBsParams {
  double alpha = 1.0;
  double mu = 0.0;
};

// d-variate log-BS with common shape alpha, location mu and correlation
// matrix psi (unit diagonal, positive definite).
struct MvLogBsParams {
  double alpha = 1.0;
  Eigen::VectorXd mu;
  Eigen::MatrixXd psi;
};

// Smallest admissible Cholesky pivot of a correlation matrix.
inline constexpr double kMinCholeskyPivot = 1e-10;

/// Cholesky factor of a correlation/covariance matrix. Throws
/// NotPositiveDefinite when the factorization fails or any pivot is below
/// kMinCholeskyPivot; near-singular matrices are never regularized.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const Eigen::MatrixXd& matrix);

  Eigen::Index dim() const { return lower_.rows(); }
  const Eigen::MatrixXd& lower() const { return lower_; }
  double log_det() const { return log_det_; }

  // x' M^{-1} x via one triangular solve.
  double quad_form(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // M^{-1} x via two triangular solves.
  Eigen::VectorXd solve(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd inverse() const;

 private:
  Eigen::MatrixXd lower_;
  double log_det_ = 0.0;
};

// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

double standard_normal_cdf(double z);

double bs_pdf(double t, const BsParams& p);
double bs_cdf(double t, const BsParams& p);

double logbs_pdf(double y, const LogBsParams& p);
double logbs_logpdf(double y, const LogBsParams& p);
double logbs_cdf(double y, const LogBsParams& p);
// y = mu + 2 asinh(alpha * Phi^{-1}(prob) / 2)
double logbs_quantile(double prob, const LogBsParams& p);

// a_j = (2/alpha) sinh((y_j - mu_j)/2)
Eigen::VectorXd standardize(const Eigen::Ref<const Eigen::VectorXd>& y,
                            const MvLogBsParams& p);
// y_j = mu_j + 2 asinh(alpha z_j / 2), the exact inverse of standardize.
Eigen::VectorXd destandardize(const Eigen::Ref<const Eigen::VectorXd>& z,
                              const MvLogBsParams& p);

double mvlogbs_logpdf(const Eigen::Ref<const Eigen::VectorXd>& y,
                      const MvLogBsParams& p);

// count x d matrix of independent draws; deterministic given seed.
Eigen::MatrixXd sample_mvlogbs(std::size_t count, const MvLogBsParams& p,
                               std::uint64_t seed);

// Throws std::domain_error / std::invalid_argument when p violates the
// invariants of MvLogBsParams (positivity, symmetry, unit diagonal).
void validate(const MvLogBsParams& p);

}  // namespace mbsarma

#endif  // MBSARMA_DISTRIBUTIONS_HPP_

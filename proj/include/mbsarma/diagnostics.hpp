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

#ifndef MBSARMA_DIAGNOSTICS_HPP_
#define MBSARMA_DIAGNOSTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mbsarma/estimation.hpp"
#include "mbsarma/model.hpp"

namespace mbsarma {

struct ResidualSet {
  // (n - m) x d, rows a_t = (2/alpha) sinh((Y_t - mu_t)/2).
  Eigen::MatrixXd a;
  // Squared Mahalanobis distances. Each a_t is N(0, psi) under the model,
  // so d2_t = a_t' psi^{-1} a_t, which equals s_t' sigma^{-1} s_t with
  // s_t = sinh((Y_t - mu_t)/2) and sigma = alpha^2 psi / 4.
  Eigen::VectorXd d2;
  Eigen::MatrixXd sigma_hat;
  std::size_t first_index = 0;  // panel row of a.row(0)
};

ResidualSet residuals(const ModelSpec& spec, const ParamVector& params,
                      const SeriesPanel& panel);
ResidualSet residuals(const FitResult& fit, const SeriesPanel& panel);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// P(K > lambda) for the Kolmogorov limiting distribution.
double kolmogorov_survival(double lambda);

// One-sample KS test of d2 against chi-squared(dof), asymptotic p-value.
KsResult ks_test_chi2(const Eigen::VectorXd& d2, int dof);

// Sample autocorrelations at lags 0..max_lag.
Eigen::VectorXd acf(const Eigen::VectorXd& series, std::size_t max_lag);
// Partial autocorrelations at lags 1..max_lag (Durbin-Levinson); entry 0 is
// lag 1.
Eigen::VectorXd pacf(const Eigen::VectorXd& series, std::size_t max_lag);

struct LjungBoxResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t lags = 0;
};

LjungBoxResult ljung_box(const Eigen::VectorXd& series, std::size_t lags = 12);

struct QqRow {
  double theoretical = 0.0;
  double observed = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

std::vector<QqRow> qq_envelope(const Eigen::VectorXd& d2, int dof, int n_sim = 100,
                               double level = 0.95, std::uint64_t seed = 1);

}  // namespace mbsarma

#endif  // MBSARMA_DIAGNOSTICS_HPP_

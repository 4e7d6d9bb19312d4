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

#ifndef MBSARMA_MODEL_HPP_
#define MBSARMA_MODEL_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace mbsarma {

// Dimensions and component-wise ARMA orders of an MBSARMA(p, q) model.
//
// condition_on raises the conditioning index above the model's own
// max order; candidates compared by BIC share one effective sample this way.
struct ModelSpec {
  std::size_t d = 1;
  std::size_t k = 0;
  std::vector<std::size_t> p;
  std::vector<std::size_t> q;
  std::size_t condition_on = 0;

  static ModelSpec symmetric(std::size_t d, std::size_t k, std::size_t p,
                             std::size_t q);

  // m = max_j max(p_j, q_j)
  std::size_t max_order() const;
  // Index of the first modelled observation: max(m, condition_on).
  std::size_t start() const { return std::max(max_order(), condition_on); }
  // p_j + q_j + k + 1
  std::size_t component_size(std::size_t j) const;
  std::size_t dynamics_size() const;
  // 1 + sum_j (p_j + q_j + k + 1) + d(d-1)/2
  std::size_t free_parameters() const;
  std::size_t correlation_size() const { return d * (d - 1) / 2; }

  void validate() const;
  std::string label() const;
};

struct ComponentParams {
  std::vector<double> phi;
  std::vector<double> theta;
  std::vector<double> beta;
  double eta = 0.0;
};

// Full parameter vector: alpha, (phi_j, theta_j, beta_j, eta_j) per
// component, and the strictly-lower entries of psi in column-major order
// (psi_21, psi_31, ..., psi_32, ...), i.e. rho_12, rho_13, rho_23 for d = 3.
struct ParamVector {
  double alpha = 1.0;
  std::vector<ComponentParams> components;
  std::vector<double> psi_lower;

  static ParamVector zeros(const ModelSpec& spec);

  Eigen::MatrixXd psi() const;
  void set_psi(const Eigen::MatrixXd& psi);

  // Flat layout alpha, gamma_0, vech(psi).
  Eigen::VectorXd flatten() const;
  static ParamVector unflatten(const ModelSpec& spec, const Eigen::VectorXd& flat);

  // The dynamics block gamma_0 alone.
  Eigen::VectorXd dynamics() const;
  void set_dynamics(const Eigen::VectorXd& gamma0);

  static std::vector<std::string> names(const ModelSpec& spec);

  // Throws std::invalid_argument when the shape disagrees with spec.
  void check_shape(const ModelSpec& spec) const;
};

// Log-scale responses y (n x d) with covariates x (n x k).
struct SeriesPanel {
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;

  std::size_t n() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(y.cols()); }
  std::size_t k() const { return static_cast<std::size_t>(x.cols()); }

  SeriesPanel head(std::size_t rows) const;
  void check(const ModelSpec& spec) const;
};

// Conditional locations and innovations. Rows before valid_from hold NaN
// locations and zero innovations.
struct LocationState {
  Eigen::MatrixXd mu;
  Eigen::MatrixXd u;
  std::size_t valid_from = 0;
};

LocationState compute_locations(const ModelSpec& spec, const ParamVector& params,
                                const SeriesPanel& panel);

// Sum over t >= start of the multivariate log-BS log-density of Y_t given
// the past. Throws NotPositiveDefinite for an inadmissible psi; returns
// -infinity only when the residuals overflow.
double conditional_loglik(const ModelSpec& spec, const ParamVector& params,
                          const SeriesPanel& panel);

struct RootReport {
  bool ar_stationary = true;
  bool ma_invertible = true;
  double min_ar_root_modulus;
  double min_ma_root_modulus;
  double min_root_modulus;
};

// Smallest modulus of the roots of 1 - sum c_i z^i (sign = -1) or
// 1 + sum c_i z^i (sign = +1); +infinity for a constant polynomial.
double min_root_modulus(const std::vector<double>& coefs, double sign);

std::vector<RootReport> check_roots(const ModelSpec& spec, const ParamVector& params);

// AR roots inside this modulus are flagged as near unit root.
inline constexpr double kNearUnitRootModulus = 1.02;

struct UnconditionalMean {
  Eigen::VectorXd mean;
  std::vector<bool> near_unit_root;
};

UnconditionalMean unconditional_mean(const ModelSpec& spec, const ParamVector& params,
                                     const Eigen::VectorXd& x_t);

}  // namespace mbsarma

#endif  // MBSARMA_MODEL_HPP_

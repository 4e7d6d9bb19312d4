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

#ifndef MBSARMA_ESTIMATION_HPP_
#define MBSARMA_ESTIMATION_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mbsarma/model.hpp"
#include "mbsarma/optim.hpp"

namespace mbsarma {

// How M-step (a) updates (alpha, psi) from R.
enum class ShapeCorrUpdate {
  // Exact maximizer of the likelihood over alpha and unit-diagonal psi,
  // started from the closed form. Guarantees EM ascent.
  kExact,
  // alpha = 2 sqrt(tr(R)/d), psi = D^{-1} R D^{-1}. Coincides with kExact
  // when R has a constant diagonal (always for d = 1).
  kClosedForm,
};

struct EmSettings {
  double loglik_tol = 1e-6;
  int max_em_iters = 500;
  double bfgs_grad_tol = 1e-8;
  int bfgs_max_iters = 200;
  double hessian_step = 1e-5;
  bool compute_std_errors = true;
  ShapeCorrUpdate shape_corr_update = ShapeCorrUpdate::kExact;
};

// Per-observation quantities of the Q function at the current parameters,
// over the rows t >= spec.start().
struct EmInternals {
  Eigen::MatrixXd s;      // sinh((Y - mu)/2)
  Eigen::MatrixXd kappa;  // cosh((Y - mu)/2)
  Eigen::MatrixXd S;      // sum_t s_t s_t'
  Eigen::MatrixXd R;      // S / (n - m)
  Eigen::MatrixXd v;      // rows psi^{-1} a_t
};

EmInternals compute_internals(const ModelSpec& spec, const ParamVector& params,
                              const SeriesPanel& panel);

// Q(gamma) with c_0 = -(n-m)(d/2) log(2 pi). The E-step weights are all
// one, so this coincides with conditional_loglik.
double q_function(const ModelSpec& spec, const ParamVector& params,
                  const SeriesPanel& panel);

struct ShapeCorr {
  double alpha = 1.0;
  Eigen::MatrixXd psi;
};

ShapeCorr closed_form_shape_corr(const Eigen::MatrixXd& R);
ShapeCorr m_step_shape_corr(const EmInternals& internals,
                            ShapeCorrUpdate update = ShapeCorrUpdate::kExact);

// Analytic gradient of the log-likelihood with respect to gamma_0, with
// alpha and psi held at their values in params.
Eigen::VectorXd dynamics_score(const ModelSpec& spec, const ParamVector& params,
                               const SeriesPanel& panel);

struct DynamicsStep {
  ParamVector params;
  OptimResult optim;
};

DynamicsStep m_step_dynamics(const ModelSpec& spec, const ParamVector& params,
                             const SeriesPanel& panel, const EmSettings& settings);

// Gaussian ARMAX(p_j, q_j) for one component by conditional least squares
// over the same location recursion.
struct GaussianArmaxFit {
  ComponentParams params;
  double sigma2 = 0.0;
  bool converged = false;
};

GaussianArmaxFit fit_gaussian_armax(const ModelSpec& spec, const SeriesPanel& panel,
                                    std::size_t component, const EmSettings& settings = {});

ParamVector initialize(const ModelSpec& spec, const SeriesPanel& panel,
                       const EmSettings& settings = {});

struct StdErrorResult {
  ParamVector std_errors;      // NaN where unavailable
  std::vector<bool> available;  // flat layout of ParamVector::flatten
  bool information_pd = false;
  Eigen::MatrixXd hessian;
};

StdErrorResult observed_info_std_errors(const ModelSpec& spec, const ParamVector& params_hat,
                                        const SeriesPanel& panel, const EmSettings& settings);

struct HessianStdErrors {
  Eigen::VectorXd se;  // NaN where unavailable
  std::vector<bool> available;
  bool information_pd = false;
};

// sqrt(diag((-H)^{-1})) for the Hessian H of a log-likelihood at its
// maximizer. Coordinates with a non-positive variance come back NaN.
HessianStdErrors std_errors_from_hessian(const Eigen::MatrixXd& hessian);

struct FitResult {
  ModelSpec spec;
  ParamVector estimates;
  ParamVector std_errors;
  std::vector<bool> se_available;
  bool information_pd = false;
  double loglik = 0.0;
  double bic = 0.0;
  std::size_t effective_n = 0;
  int em_iterations = 0;
  std::vector<double> em_trace;  // [0] is the initial value
  bool converged = false;
  std::vector<RootReport> root_report;
  std::vector<std::string> warnings;
};

FitResult em_fit(const ModelSpec& spec, const SeriesPanel& panel,
                 const EmSettings& settings = {},
                 const std::optional<ParamVector>& init = std::nullopt);

double bic_value(double loglik, std::size_t free_parameters, std::size_t effective_n);
double bic(const FitResult& fit);

struct RankedModel {
  ModelSpec spec;
  std::optional<FitResult> fit;
  double bic = 0.0;
  std::string error;
};

// Fits every candidate on the effective sample of the largest conditioning
// order among them and sorts by ascending BIC; failed fits go last.
std::vector<RankedModel> select_by_bic(const SeriesPanel& panel,
                                       const std::vector<ModelSpec>& candidates,
                                       const EmSettings& settings = {});

}  // namespace mbsarma

#endif  // MBSARMA_ESTIMATION_HPP_

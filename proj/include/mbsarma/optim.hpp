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

#ifndef MBSARMA_OPTIM_HPP_
#define MBSARMA_OPTIM_HPP_

#include <functional>

#include <Eigen/Core>

namespace mbsarma {

// Objective for minimization. When grad is non-null it must be filled with
// the gradient at x. Non-finite values mark x as infeasible; the line
// search backtracks away from them.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsSettings {
  double grad_tol = 1e-8;
  int max_iters = 200;
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 60;
};

enum class OptimStatus {
  kGradientConverged,
  kNoProgress,
  kMaxIterations,
  kLineSearchFailed,
};

const char* to_string(OptimStatus status);

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_norm = 0.0;  // infinity norm at x
  int iterations = 0;
  int evaluations = 0;
  OptimStatus status = OptimStatus::kMaxIterations;
};

// Quasi-Newton BFGS with an Armijo backtracking line search. The inverse
// Hessian starts at the identity, is rescaled after the first accepted
// step, skips updates failing the curvature condition and resets on a
// non-descent direction. The returned point never has a larger objective
// than x0.
OptimResult minimize_bfgs(const Objective& objective, const Eigen::VectorXd& x0,
                          const BfgsSettings& settings = {});

// Central finite-difference Hessian of f at x with per-coordinate step
// rel_step * max(1, |x_i|). The result is symmetric by construction.
Eigen::MatrixXd central_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x, double rel_step);

}  // namespace mbsarma

#endif  // MBSARMA_OPTIM_HPP_

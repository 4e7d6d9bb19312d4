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

#include "mbsarma/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mbsarma {

const char* to_string(OptimStatus status) {
  switch (status) {
    case OptimStatus::kGradientConverged: return "gradient_converged";
    case OptimStatus::kNoProgress: return "no_progress";
    case OptimStatus::kMaxIterations: return "max_iterations";
    case OptimStatus::kLineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

OptimResult minimize_bfgs(const Objective& objective, const Eigen::VectorXd& x0,
                          const BfgsSettings& settings) {
  const Eigen::Index n = x0.size();
  OptimResult result;
  result.x = x0;
  Eigen::VectorXd grad(n);
  result.value = objective(result.x, &grad);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !grad.allFinite()) {
    result.grad_norm = std::numeric_limits<double>::infinity();
    result.status = OptimStatus::kLineSearchFailed;
    return result;
  }
  result.grad_norm = grad.lpNorm<Eigen::Infinity>();
  if (n == 0 || result.grad_norm < settings.grad_tol) {
    result.status = OptimStatus::kGradientConverged;
    return result;
  }

  Eigen::MatrixXd inv_hess = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  Eigen::VectorXd trial(n);
  Eigen::VectorXd trial_grad(n);
  int stalls = 0;

  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    result.iterations = iter;
    Eigen::VectorXd dir = -inv_hess * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      inv_hess.setIdentity();
      scaled = false;
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    double step = 1.0;
    double trial_value = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < settings.max_backtracks; ++bt) {
      trial = result.x + step * dir;
      trial_value = objective(trial, &trial_grad);
      ++result.evaluations;
      const bool usable = std::isfinite(trial_value) && trial_grad.allFinite();
      const bool sufficient = trial_value <= result.value + settings.armijo_c1 * step * slope;
      // Near the optimum the decrease drowns in rounding; accept a tie that
      // still shrinks the gradient.
      const bool tie = std::abs(trial_value - result.value) <= 1e-14 * (1.0 + std::abs(result.value)) &&
                       trial_grad.lpNorm<Eigen::Infinity>() < result.grad_norm;
      if (usable && (sufficient || tie)) {
        accepted = true;
        break;
      }
      // Safeguarded quadratic interpolation through f(0), f'(0), f(step);
      // plain shrinking when the trial value is unusable.
      double next = step * settings.shrink;
      if (std::isfinite(trial_value)) {
        const double curv = trial_value - result.value - slope * step;
        if (curv > 0.0) {
          next = std::clamp(-slope * step * step / (2.0 * curv), 0.1 * step, 0.5 * step);
        }
      }
      step = next;
    }
    if (!accepted) {
      if (!inv_hess.isIdentity()) {
        // retry once along steepest descent before giving up
        inv_hess.setIdentity();
        scaled = false;
        continue;
      }
      result.status = OptimStatus::kLineSearchFailed;
      return result;
    }

    if (!scaled && step == 1.0) {
      // Unscaled steepest descent has no sense of length; one interpolated
      // evaluation along the line fixes the first step cheaply.
      const double curv = trial_value - result.value - slope * step;
      if (curv > 0.0) {
        const double t = -slope * step * step / (2.0 * curv);
        if (t < 0.8 * step || t > 1.25 * step) {
          Eigen::VectorXd alt = result.x + t * dir;
          Eigen::VectorXd alt_grad(n);
          const double alt_value = objective(alt, &alt_grad);
          ++result.evaluations;
          if (std::isfinite(alt_value) && alt_grad.allFinite() && alt_value < trial_value) {
            trial = alt;
            trial_value = alt_value;
            trial_grad = alt_grad;
          }
        }
      }
    }

    const Eigen::VectorXd s = trial - result.x;
    const Eigen::VectorXd y = trial_grad - grad;
    const double improvement = result.value - trial_value;
    result.x = trial;
    result.value = trial_value;
    grad = trial_grad;
    result.grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (result.grad_norm < settings.grad_tol) {
      result.status = OptimStatus::kGradientConverged;
      return result;
    }
    if (improvement <= 1e-15 * (1.0 + std::abs(result.value))) {
      if (++stalls >= 3) {
        result.status = OptimStatus::kNoProgress;
        return result;
      }
    } else {
      stalls = 0;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        inv_hess *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = inv_hess * y;
      const double yhy = y.dot(hy);
      inv_hess += (rho * rho * yhy + rho) * (s * s.transpose()) -
                  rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  result.status = OptimStatus::kMaxIterations;
  return result;
}

Eigen::MatrixXd central_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& x, double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = rel_step * std::max(1.0, std::abs(x[i]));
  const double f0 = f(x);
  Eigen::MatrixXd hess(n, n);
  Eigen::VectorXd pt = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    pt[i] = x[i] + h[i];
    const double fp = f(pt);
    pt[i] = x[i] - h[i];
    const double fm = f(pt);
    pt[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      pt[i] = x[i] + h[i];
      pt[j] = x[j] + h[j];
      const double fpp = f(pt);
      pt[j] = x[j] - h[j];
      const double fpm = f(pt);
      pt[i] = x[i] - h[i];
      const double fmm = f(pt);
      pt[j] = x[j] + h[j];
      const double fmp = f(pt);
      pt[i] = x[i];
      pt[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

}  // namespace mbsarma

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

#include "mbsarma/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "mbsarma/detail/recursion.hpp"
#include "mbsarma/distributions.hpp"
#include "mbsarma/errors.hpp"
#include "mbsarma/parallel.hpp"

namespace mbsarma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Log-likelihood as a function of gamma_0 with alpha and psi frozen.
class DynamicsObjective {
 public:
  DynamicsObjective(const ModelSpec& spec, const ParamVector& params,
                    const SeriesPanel& panel)
      : spec_(spec), panel_(panel), base_(params) {
    const CholeskyFactor factor(params.psi());
    psi_inv_ = factor.inverse();
    const auto d = static_cast<double>(spec.d);
    const auto count = static_cast<double>(panel.n() - spec.start());
    constant_ = count * d * std::log(2.0 / params.alpha) -
                count * (0.5 * d * std::log(2.0 * std::numbers::pi) +
                         d * std::numbers::ln2 + 0.5 * factor.log_det());
  }

  double operator()(const Eigen::VectorXd& gamma0, Eigen::VectorXd* score) const {
    ParamVector params = base_;
    params.set_dynamics(gamma0);
    const auto n = static_cast<Eigen::Index>(panel_.n());
    const auto d = static_cast<Eigen::Index>(spec_.d);
    const auto s0 = static_cast<Eigen::Index>(spec_.start());
    const double alpha = params.alpha;

    Eigen::MatrixXd mu(n, d);
    Eigen::MatrixXd u(n, d);
    std::vector<Eigen::MatrixXd> jacs(score != nullptr ? spec_.d : 0);
    for (Eigen::Index j = 0; j < d; ++j) {
      detail::component_recursion(spec_, static_cast<std::size_t>(j),
                                  params.components[static_cast<std::size_t>(j)], panel_,
                                  spec_.start(), mu.col(j), u.col(j),
                                  score != nullptr ? &jacs[static_cast<std::size_t>(j)]
                                                   : nullptr);
    }

    Eigen::MatrixXd weights;
    if (score != nullptr) weights.setZero(n, d);
    double sum_log_cosh = 0.0;
    double quad = 0.0;
    Eigen::VectorXd a(d);
    Eigen::VectorXd v(d);
    for (Eigen::Index t = s0; t < n; ++t) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double h = 0.5 * u(t, j);
        a[j] = 2.0 / alpha * std::sinh(h);
        sum_log_cosh += log_cosh(h);
      }
      v.noalias() = psi_inv_ * a;
      quad += a.dot(v);
      if (score != nullptr) {
        for (Eigen::Index j = 0; j < d; ++j) {
          const double h = 0.5 * u(t, j);
          const double c = 2.0 / alpha * std::cosh(h);
          weights(t, j) = 0.5 * (c * v[j] - std::tanh(h));
        }
      }
    }
    const double value = constant_ + sum_log_cosh - 0.5 * quad;
    if (!std::isfinite(value)) return -kInf;
    if (score != nullptr) {
      score->resize(static_cast<Eigen::Index>(spec_.dynamics_size()));
      Eigen::Index offset = 0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& jac = jacs[static_cast<std::size_t>(j)];
        score->segment(offset, jac.cols()).noalias() = jac.transpose() * weights.col(j);
        offset += jac.cols();
      }
    }
    return value;
  }

 private:
  const ModelSpec& spec_;
  const SeriesPanel& panel_;
  ParamVector base_;
  Eigen::MatrixXd psi_inv_;
  double constant_ = 0.0;
};

Eigen::VectorXd strict_lower(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  Eigen::VectorXd out(d * (d - 1) / 2);
  Eigen::Index pos = 0;
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = c + 1; r < d; ++r) out[pos++] = m(r, c);
  }
  return out;
}

Eigen::MatrixXd correlation_from_lower(const Eigen::VectorXd& lower, Eigen::Index d) {
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(d, d);
  Eigen::Index pos = 0;
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = c + 1; r < d; ++r) psi(r, c) = psi(c, r) = lower[pos++];
  }
  return psi;
}

// Minimizes d log tr(psi^{-1} R) + log|psi| over unit-diagonal psi; this is
// the likelihood in (alpha, psi) with alpha profiled out.
ShapeCorr exact_shape_corr(const Eigen::MatrixXd& R, const ShapeCorr& start) {
  const Eigen::Index d = R.rows();
  const auto dd = static_cast<double>(d);
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) -> double {
    const Eigen::MatrixXd psi = correlation_from_lower(x, d);
    Eigen::LLT<Eigen::MatrixXd> llt(psi);
    if (llt.info() != Eigen::Success) return kInf;
    const Eigen::MatrixXd lower = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!(lower(i, i) >= kMinCholeskyPivot)) return kInf;
      log_det += 2.0 * std::log(lower(i, i));
    }
    const Eigen::MatrixXd psi_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    const Eigen::MatrixXd a = psi_inv * R;
    const double tr = a.trace();
    if (!(tr > 0.0)) return kInf;
    if (grad != nullptr) {
      const Eigen::MatrixXd b = a * psi_inv;  // psi^{-1} R psi^{-1}
      *grad = strict_lower(2.0 * psi_inv - (2.0 * dd / tr) * b);
    }
    return dd * std::log(tr) + log_det;
  };
  BfgsSettings settings;
  settings.grad_tol = 1e-12;
  settings.max_iters = 500;
  const OptimResult res = minimize_bfgs(objective, strict_lower(start.psi), settings);
  ShapeCorr out;
  out.psi = correlation_from_lower(res.x, d);
  const Eigen::MatrixXd psi_inv = out.psi.llt().solve(Eigen::MatrixXd::Identity(d, d));
  out.alpha = 2.0 * std::sqrt((psi_inv * R).trace() / dd);
  return out;
}

Eigen::MatrixXd repair_correlation(Eigen::MatrixXd psi) {
  const Eigen::Index d = psi.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  auto min_eig = [](const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  };
  if (min_eig(psi) >= 1e-8) return psi;
  for (double lambda : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    const Eigen::MatrixXd shrunk = (1.0 - lambda) * psi + lambda * id;
    if (min_eig(shrunk) >= 1e-8) return shrunk;
  }
  return id;
}

void check_responses(const SeriesPanel& panel) {
  for (Eigen::Index j = 0; j < panel.y.cols(); ++j) {
    if (panel.y.col(j).maxCoeff() - panel.y.col(j).minCoeff() <= 0.0) {
      throw DegenerateData("response component " + std::to_string(j + 1) + " is constant");
    }
  }
}

}  // namespace

EmInternals compute_internals(const ModelSpec& spec, const ParamVector& params,
                              const SeriesPanel& panel) {
  const LocationState state = compute_locations(spec, params, panel);
  const auto s0 = static_cast<Eigen::Index>(state.valid_from);
  const Eigen::Index rows = panel.y.rows() - s0;
  EmInternals out;
  const Eigen::MatrixXd half = 0.5 * state.u.bottomRows(rows);
  out.s = half.array().sinh().matrix();
  out.kappa = half.array().cosh().matrix();
  out.S = out.s.transpose() * out.s;
  out.R = out.S / static_cast<double>(rows);
  const CholeskyFactor factor(params.psi());
  const Eigen::MatrixXd a = (2.0 / params.alpha) * out.s;
  out.v = (factor.inverse() * a.transpose()).transpose();
  return out;
}

double q_function(const ModelSpec& spec, const ParamVector& params,
                  const SeriesPanel& panel) {
  const LocationState state = compute_locations(spec, params, panel);
  const auto s0 = static_cast<Eigen::Index>(state.valid_from);
  const Eigen::Index rows = panel.y.rows() - s0;
  const CholeskyFactor factor(params.psi());
  const auto count = static_cast<double>(rows);
  const auto d = static_cast<double>(spec.d);
  double sum_log_kappa = 0.0;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(panel.y.cols(), panel.y.cols());
  Eigen::VectorXd s(panel.y.cols());
  for (Eigen::Index t = s0; t < panel.y.rows(); ++t) {
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      const double h = 0.5 * state.u(t, j);
      s[j] = std::sinh(h);
      sum_log_kappa += log_cosh(h);
    }
    S.noalias() += s * s.transpose();
  }
  const double c0 = -count * 0.5 * d * std::log(2.0 * std::numbers::pi);
  const double trace = (factor.inverse() * S).trace();
  const double value = c0 - count * d * std::log(params.alpha) -
                       0.5 * count * factor.log_det() + sum_log_kappa -
                       2.0 / (params.alpha * params.alpha) * trace;
  return std::isfinite(value) ? value : -kInf;
}

ShapeCorr closed_form_shape_corr(const Eigen::MatrixXd& R) {
  const Eigen::Index d = R.rows();
  if (d == 0 || R.cols() != d) throw std::invalid_argument("R must be a nonempty square matrix");
  Eigen::VectorXd scale(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(R(j, j) > 0.0) || !std::isfinite(R(j, j))) {
      throw DegenerateData("component " + std::to_string(j + 1) +
                           " has zero residual variance; alpha and psi are undefined");
    }
    scale[j] = 1.0 / std::sqrt(R(j, j));
  }
  ShapeCorr out;
  out.alpha = 2.0 * std::sqrt(R.trace() / static_cast<double>(d));
  out.psi = scale.asDiagonal() * R * scale.asDiagonal();
  out.psi.diagonal().setOnes();
  out.psi = 0.5 * (out.psi + out.psi.transpose()).eval();
  return out;
}

ShapeCorr m_step_shape_corr(const EmInternals& internals, ShapeCorrUpdate update) {
  const ShapeCorr closed = closed_form_shape_corr(internals.R);
  if (update == ShapeCorrUpdate::kClosedForm || internals.R.rows() == 1) return closed;
  return exact_shape_corr(internals.R, closed);
}

Eigen::VectorXd dynamics_score(const ModelSpec& spec, const ParamVector& params,
                               const SeriesPanel& panel) {
  params.check_shape(spec);
  panel.check(spec);
  const DynamicsObjective objective(spec, params, panel);
  Eigen::VectorXd score;
  objective(params.dynamics(), &score);
  return score;
}

DynamicsStep m_step_dynamics(const ModelSpec& spec, const ParamVector& params,
                             const SeriesPanel& panel, const EmSettings& settings) {
  params.check_shape(spec);
  panel.check(spec);
  const DynamicsObjective loglik(spec, params, panel);
  auto negated = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const double v = loglik(x, grad);
    if (grad != nullptr) *grad = -*grad;
    return -v;
  };
  BfgsSettings bfgs;
  bfgs.grad_tol = settings.bfgs_grad_tol;
  bfgs.max_iters = settings.bfgs_max_iters;
  DynamicsStep step;
  step.optim = minimize_bfgs(negated, params.dynamics(), bfgs);
  step.params = params;
  step.params.set_dynamics(step.optim.x);
  return step;
}

GaussianArmaxFit fit_gaussian_armax(const ModelSpec& spec, const SeriesPanel& panel,
                                    std::size_t component, const EmSettings& settings) {
  spec.validate();
  panel.check(spec);
  const auto col = static_cast<Eigen::Index>(component);
  const auto s0 = static_cast<Eigen::Index>(spec.start());
  const auto n = static_cast<Eigen::Index>(panel.n());
  const auto k = static_cast<Eigen::Index>(spec.k);
  const Eigen::Index rows = n - s0;

  ComponentParams start;
  start.phi.assign(spec.p[component], 0.0);
  start.theta.assign(spec.q[component], 0.0);
  start.beta.assign(spec.k, 0.0);
  {
    Eigen::MatrixXd design(rows, k + 1);
    design.leftCols(k) = panel.x.bottomRows(rows);
    design.col(k).setOnes();
    const Eigen::VectorXd coef =
        design.colPivHouseholderQr().solve(panel.y.col(col).tail(rows));
    for (Eigen::Index l = 0; l < k; ++l) start.beta[static_cast<std::size_t>(l)] = coef[l];
    start.eta = coef[k];
    if (!coef.allFinite()) {
      start.beta.assign(spec.k, 0.0);
      start.eta = panel.y.col(col).tail(rows).mean();
    }
  }

  auto pack = [&](const ComponentParams& c) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(spec.component_size(component)));
    Eigen::Index pos = 0;
    for (double v : c.phi) x[pos++] = v;
    for (double v : c.theta) x[pos++] = v;
    for (double v : c.beta) x[pos++] = v;
    x[pos] = c.eta;
    return x;
  };
  auto unpack = [&](const Eigen::VectorXd& x) {
    ComponentParams c = start;
    Eigen::Index pos = 0;
    for (auto& v : c.phi) v = x[pos++];
    for (auto& v : c.theta) v = x[pos++];
    for (auto& v : c.beta) v = x[pos++];
    c.eta = x[pos];
    return c;
  };

  Eigen::VectorXd mu(n);
  Eigen::VectorXd u(n);
  Eigen::MatrixXd jac;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) -> double {
    detail::component_recursion(spec, component, unpack(x), panel, spec.start(), mu, u,
                                grad != nullptr ? &jac : nullptr);
    const Eigen::VectorXd resid = u.tail(rows);
    const double value = 0.5 * resid.squaredNorm() / static_cast<double>(rows);
    if (grad != nullptr) {
      *grad = -(jac.bottomRows(rows).transpose() * resid) / static_cast<double>(rows);
    }
    return std::isfinite(value) ? value : kInf;
  };

  BfgsSettings bfgs;
  bfgs.grad_tol = settings.bfgs_grad_tol;
  bfgs.max_iters = std::max(settings.bfgs_max_iters, 500);
  const OptimResult res = minimize_bfgs(objective, pack(start), bfgs);

  GaussianArmaxFit fit;
  fit.params = unpack(res.x);
  fit.sigma2 = 2.0 * res.value;
  fit.converged = res.status == OptimStatus::kGradientConverged ||
                  res.status == OptimStatus::kNoProgress;
  return fit;
}

ParamVector initialize(const ModelSpec& spec, const SeriesPanel& panel,
                       const EmSettings& settings) {
  spec.validate();
  panel.check(spec);
  ParamVector params = ParamVector::zeros(spec);
  const auto s0 = static_cast<Eigen::Index>(spec.start());
  const Eigen::Index rows = panel.y.rows() - s0;
  for (std::size_t j = 0; j < spec.d; ++j) {
    GaussianArmaxFit fit;
    bool ok = true;
    try {
      fit = fit_gaussian_armax(spec, panel, j, settings);
      ok = std::isfinite(fit.sigma2) && std::isfinite(fit.params.eta);
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) {
      params.components[j] = fit.params;
    } else {
      params.components[j].eta = panel.y.col(static_cast<Eigen::Index>(j)).mean();
    }
  }

  const LocationState state = compute_locations(spec, params, panel);
  const Eigen::MatrixXd half = 0.5 * state.u.bottomRows(rows);
  const Eigen::MatrixXd s = half.array().sinh().matrix();
  double alpha_sum = 0.0;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    alpha_sum += 2.0 * std::sqrt(s.col(j).squaredNorm() / static_cast<double>(rows));
  }
  params.alpha = alpha_sum / static_cast<double>(spec.d);
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw DegenerateData("initial shape estimate is zero or non-finite");
  }
  const Eigen::MatrixXd a = (2.0 / params.alpha) * s;
  const Eigen::MatrixXd r = a.transpose() * a / static_cast<double>(rows);
  params.set_psi(repair_correlation(closed_form_shape_corr(r).psi));
  return params;
}

HessianStdErrors std_errors_from_hessian(const Eigen::MatrixXd& hessian) {
  const Eigen::Index n = hessian.rows();
  HessianStdErrors out;
  out.se = Eigen::VectorXd::Constant(n, kNaN);
  out.available.assign(static_cast<std::size_t>(n), false);
  if (!hessian.allFinite()) return out;
  const Eigen::MatrixXd info = -hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  Eigen::MatrixXd cov;
  if (llt.info() == Eigen::Success) {
    out.information_pd = true;
    cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
  } else {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
    if (!lu.isInvertible()) return out;
    cov = lu.inverse();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = cov(i, i);
    if (var > 0.0 && std::isfinite(var)) {
      out.se[i] = std::sqrt(var);
      out.available[static_cast<std::size_t>(i)] = true;
    }
  }
  return out;
}

StdErrorResult observed_info_std_errors(const ModelSpec& spec, const ParamVector& params_hat,
                                        const SeriesPanel& panel, const EmSettings& settings) {
  params_hat.check_shape(spec);
  auto loglik = [&](const Eigen::VectorXd& flat) {
    try {
      return conditional_loglik(spec, ParamVector::unflatten(spec, flat), panel);
    } catch (const NotPositiveDefinite&) {
      return kNaN;
    } catch (const std::domain_error&) {
      return kNaN;
    }
  };
  StdErrorResult out;
  out.hessian = central_hessian(loglik, params_hat.flatten(), settings.hessian_step);
  const HessianStdErrors se = std_errors_from_hessian(out.hessian);
  out.std_errors = ParamVector::unflatten(spec, se.se);
  out.available = se.available;
  out.information_pd = se.information_pd;
  return out;
}

double bic_value(double loglik, std::size_t free_parameters, std::size_t effective_n) {
  return -2.0 * loglik +
         static_cast<double>(free_parameters) * std::log(static_cast<double>(effective_n));
}

double bic(const FitResult& fit) {
  return bic_value(fit.loglik, fit.spec.free_parameters(), fit.effective_n);
}

FitResult em_fit(const ModelSpec& spec, const SeriesPanel& panel, const EmSettings& settings,
                 const std::optional<ParamVector>& init) {
  spec.validate();
  panel.check(spec);
  check_responses(panel);

  FitResult fit;
  fit.spec = spec;
  fit.effective_n = panel.n() - spec.start();
  for (Eigen::Index l = 0; l < panel.x.cols(); ++l) {
    const auto col = panel.x.col(l);
    if (col.maxCoeff() == col.minCoeff()) {
      fit.warnings.push_back("covariate " + std::to_string(l + 1) +
                             " is constant and collinear with the intercepts");
    }
  }

  ParamVector params = init ? *init : initialize(spec, panel, settings);
  params.check_shape(spec);
  double ell = conditional_loglik(spec, params, panel);
  if (!std::isfinite(ell)) {
    throw DegenerateData("log-likelihood is not finite at the initial values");
  }
  fit.em_trace.push_back(ell);

  for (int iter = 1; iter <= settings.max_em_iters; ++iter) {
    fit.em_iterations = iter;
    // E-step: the latent weights are identically one.
    // M-step (a)
    const EmInternals internals = compute_internals(spec, params, panel);
    const ShapeCorr sc = m_step_shape_corr(internals, settings.shape_corr_update);
    ParamVector candidate = params;
    candidate.alpha = sc.alpha;
    candidate.set_psi(sc.psi);
    double candidate_ell = -kInf;
    try {
      candidate_ell = conditional_loglik(spec, candidate, panel);
    } catch (const NotPositiveDefinite&) {
    }
    if (settings.shape_corr_update == ShapeCorrUpdate::kClosedForm
            ? std::isfinite(candidate_ell)
            : candidate_ell >= ell) {
      params = candidate;
    }
    // M-step (b)
    const DynamicsStep step = m_step_dynamics(spec, params, panel, settings);
    params = step.params;

    const double next = conditional_loglik(spec, params, panel);
    fit.em_trace.push_back(next);
    const double change = std::abs(next - ell);
    ell = next;
    if (change < settings.loglik_tol) {
      fit.converged = true;
      break;
    }
  }

  fit.estimates = params;
  fit.loglik = ell;
  fit.bic = bic(fit);
  fit.root_report = check_roots(spec, params);
  for (std::size_t j = 0; j < fit.root_report.size(); ++j) {
    if (!fit.root_report[j].ar_stationary) {
      fit.warnings.push_back("component " + std::to_string(j + 1) + " is not AR-stationary");
    }
    if (!fit.root_report[j].ma_invertible) {
      fit.warnings.push_back("component " + std::to_string(j + 1) + " is not MA-invertible");
    }
  }
  if (!fit.converged) {
    fit.warnings.push_back("EM did not converge in " + std::to_string(settings.max_em_iters) +
                           " iterations");
  }

  if (settings.compute_std_errors) {
    const StdErrorResult se = observed_info_std_errors(spec, params, panel, settings);
    fit.std_errors = se.std_errors;
    fit.se_available = se.available;
    fit.information_pd = se.information_pd;
    if (!se.information_pd) {
      fit.warnings.push_back("observed information is not positive definite; "
                             "some standard errors are unavailable");
    }
  } else {
    fit.std_errors = ParamVector::unflatten(
        spec, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(spec.free_parameters()), kNaN));
    fit.se_available.assign(spec.free_parameters(), false);
  }
  return fit;
}

std::vector<RankedModel> select_by_bic(const SeriesPanel& panel,
                                       const std::vector<ModelSpec>& candidates,
                                       const EmSettings& settings) {
  std::size_t shared_start = 0;
  for (const auto& c : candidates) shared_start = std::max(shared_start, c.start());
  std::vector<RankedModel> ranked(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    RankedModel& row = ranked[i];
    row.spec = candidates[i];
    row.spec.condition_on = shared_start;
    try {
      row.fit = em_fit(row.spec, panel, settings);
      row.bic = row.fit->bic;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.bic = kInf;
    }
  });
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedModel& a, const RankedModel& b) {
    const bool fa = a.fit.has_value();
    const bool fb = b.fit.has_value();
    if (fa != fb) return fa;
    return a.bic < b.bic;
  });
  return ranked;
}

}  // namespace mbsarma

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

#include "mbsarma/forecasting.hpp"

#include <cmath>
#include <stdexcept>

namespace mbsarma {

namespace {

void check_test_len(const ModelSpec& spec, const SeriesPanel& panel, std::size_t test_len) {
  if (test_len == 0) return;
  if (test_len + spec.start() + 1 >= panel.n()) {
    throw std::invalid_argument("test_len must be smaller than n - m - 1");
  }
}

EvalResult eval_from_locations(const LocationState& state, const SeriesPanel& panel,
                               std::size_t test_len) {
  EvalResult out;
  const auto rows = static_cast<Eigen::Index>(test_len);
  out.first_index = panel.n() - test_len;
  out.predicted = state.mu.bottomRows(rows);
  out.observed = panel.y.bottomRows(rows);
  if (test_len > 0) out.metrics = score(out.observed, out.predicted);
  return out;
}

}  // namespace

ForecastResult forecast(const ModelSpec& spec, const ParamVector& params,
                        const SeriesPanel& panel, const Eigen::MatrixXd& future_x,
                        std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  params.check_shape(spec);
  panel.check(spec);
  if (future_x.rows() < static_cast<Eigen::Index>(horizon) ||
      future_x.cols() != static_cast<Eigen::Index>(spec.k)) {
    throw std::invalid_argument("future covariates must be supplied for every step");
  }
  const LocationState state = compute_locations(spec, params, panel);
  const auto n = static_cast<Eigen::Index>(panel.n());
  const auto h = static_cast<Eigen::Index>(horizon);
  const auto d = static_cast<Eigen::Index>(spec.d);

  // Extended history: observed rows followed by forecast rows.
  Eigen::MatrixXd y(n + h, d);
  Eigen::MatrixXd x(n + h, static_cast<Eigen::Index>(spec.k));
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n + h, d);
  y.topRows(n) = panel.y;
  x.topRows(n) = panel.x;
  x.bottomRows(h) = future_x.topRows(h);
  u.topRows(n) = state.u;

  ForecastResult out;
  out.horizon = horizon;
  out.y_hat.resize(h, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const ComponentParams& c = params.components[static_cast<std::size_t>(j)];
    const Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(
        c.beta.data(), static_cast<Eigen::Index>(c.beta.size()));
    for (Eigen::Index t = n; t < n + h; ++t) {
      double mu = c.eta + (beta.size() > 0 ? x.row(t).dot(beta) : 0.0);
      for (std::size_t i = 1; i <= c.phi.size(); ++i) {
        const Eigen::Index lag = t - static_cast<Eigen::Index>(i);
        if (lag < 0) continue;
        const double reg = beta.size() > 0 ? x.row(lag).dot(beta) : 0.0;
        mu += c.phi[i - 1] * (y(lag, j) - reg);
      }
      for (std::size_t l = 1; l <= c.theta.size(); ++l) {
        const Eigen::Index lag = t - static_cast<Eigen::Index>(l);
        if (lag >= 0) mu += c.theta[l - 1] * u(lag, j);
      }
      y(t, j) = mu;
      out.y_hat(t - n, j) = mu;
    }
  }
  out.t_hat = out.y_hat.array().exp().matrix();
  return out;
}

ForecastResult forecast(const FitResult& fit, const SeriesPanel& panel,
                        const Eigen::MatrixXd& future_x, std::size_t horizon) {
  return forecast(fit.spec, fit.estimates, panel, future_x, horizon);
}

std::vector<ComponentMetrics> score(const Eigen::MatrixXd& observed,
                                    const Eigen::MatrixXd& predicted) {
  if (observed.rows() != predicted.rows() || observed.cols() != predicted.cols()) {
    throw std::invalid_argument("observed and predicted shapes differ");
  }
  std::vector<ComponentMetrics> out(static_cast<std::size_t>(observed.cols()));
  if (observed.rows() == 0) return out;
  const Eigen::MatrixXd err = observed - predicted;
  const auto rows = static_cast<double>(err.rows());
  for (Eigen::Index j = 0; j < err.cols(); ++j) {
    out[static_cast<std::size_t>(j)].rmse = std::sqrt(err.col(j).squaredNorm() / rows);
    out[static_cast<std::size_t>(j)].mae = err.col(j).cwiseAbs().sum() / rows;
  }
  return out;
}

EvalResult rolling_one_step_eval(const ModelSpec& spec, const ParamVector& params,
                                 const SeriesPanel& full_panel, std::size_t test_len) {
  params.check_shape(spec);
  full_panel.check(spec);
  check_test_len(spec, full_panel, test_len);
  // mu_t depends only on rows before t, so one pass over the full panel gives
  // every rolling one-step prediction.
  return eval_from_locations(compute_locations(spec, params, full_panel), full_panel,
                             test_len);
}

EvalResult rolling_one_step_eval(const FitResult& fit, const SeriesPanel& full_panel,
                                 std::size_t test_len) {
  return rolling_one_step_eval(fit.spec, fit.estimates, full_panel, test_len);
}

Eigen::MatrixXd naive_forecast(const SeriesPanel& panel, std::size_t test_len,
                               NaiveMode mode) {
  if (test_len >= panel.n()) throw std::invalid_argument("test_len must be smaller than n");
  const auto n = static_cast<Eigen::Index>(panel.n());
  const auto rows = static_cast<Eigen::Index>(test_len);
  const Eigen::Index origin = n - rows - 1;
  Eigen::MatrixXd out(rows, panel.y.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    out.row(i) = mode == NaiveMode::kRolling ? panel.y.row(origin + i) : panel.y.row(origin);
  }
  return out;
}

EvalResult naive_eval(const SeriesPanel& panel, std::size_t test_len, NaiveMode mode) {
  EvalResult out;
  out.predicted = naive_forecast(panel, test_len, mode);
  out.observed = panel.y.bottomRows(static_cast<Eigen::Index>(test_len));
  out.first_index = panel.n() - test_len;
  if (test_len > 0) out.metrics = score(out.observed, out.predicted);
  return out;
}

EvalResult gaussian_armax_benchmark(const ModelSpec& spec, const SeriesPanel& panel,
                                    std::size_t test_len, const EmSettings& settings) {
  panel.check(spec);
  check_test_len(spec, panel, test_len);
  const SeriesPanel train = panel.head(panel.n() - test_len);
  ParamVector params = ParamVector::zeros(spec);
  for (std::size_t j = 0; j < spec.d; ++j) {
    params.components[j] = fit_gaussian_armax(spec, train, j, settings).params;
  }
  return eval_from_locations(compute_locations(spec, params, panel), panel, test_len);
}

}  // namespace mbsarma

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

#ifndef MBSARMA_FORECASTING_HPP_
#define MBSARMA_FORECASTING_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mbsarma/estimation.hpp"
#include "mbsarma/model.hpp"

namespace mbsarma {

struct ForecastResult {
  std::size_t horizon = 0;
  Eigen::MatrixXd y_hat;  // horizon x d, log scale
  Eigen::MatrixXd t_hat;  // exp(y_hat)
};

// Multi-step forecasts from the end of panel. Unobserved responses are
// replaced by their forecasts and unobserved innovations by zero.
ForecastResult forecast(const ModelSpec& spec, const ParamVector& params,
                        const SeriesPanel& panel, const Eigen::MatrixXd& future_x,
                        std::size_t horizon);
ForecastResult forecast(const FitResult& fit, const SeriesPanel& panel,
                        const Eigen::MatrixXd& future_x, std::size_t horizon);

struct ComponentMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

struct EvalResult {
  std::vector<ComponentMetrics> metrics;  // empty when test_len == 0
  Eigen::MatrixXd predicted;              // test_len x d
  Eigen::MatrixXd observed;
  std::size_t first_index = 0;  // panel row of the first test point
};

std::vector<ComponentMetrics> score(const Eigen::MatrixXd& observed,
                                    const Eigen::MatrixXd& predicted);

// One-step predictions over the last test_len rows of full_panel, each from
// the observed history, with parameters frozen.
EvalResult rolling_one_step_eval(const ModelSpec& spec, const ParamVector& params,
                                 const SeriesPanel& full_panel, std::size_t test_len);
EvalResult rolling_one_step_eval(const FitResult& fit, const SeriesPanel& full_panel,
                                 std::size_t test_len);

enum class NaiveMode {
  kRolling,      // Y_{t-1} for each test point
  kFixedOrigin,  // last training value for every test point
};

Eigen::MatrixXd naive_forecast(const SeriesPanel& panel, std::size_t test_len,
                               NaiveMode mode = NaiveMode::kRolling);
EvalResult naive_eval(const SeriesPanel& panel, std::size_t test_len,
                      NaiveMode mode = NaiveMode::kRolling);

// Per-component Gaussian ARMAX fitted on the first n - test_len rows, then
// scored under the rolling protocol.
EvalResult gaussian_armax_benchmark(const ModelSpec& spec, const SeriesPanel& panel,
                                    std::size_t test_len, const EmSettings& settings = {});

}  // namespace mbsarma

#endif  // MBSARMA_FORECASTING_HPP_

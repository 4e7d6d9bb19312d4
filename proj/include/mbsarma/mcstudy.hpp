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

#ifndef MBSARMA_MCSTUDY_HPP_
#define MBSARMA_MCSTUDY_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mbsarma/estimation.hpp"
#include "mbsarma/model.hpp"

namespace mbsarma {

struct McScenario {
  ModelSpec spec;
  ParamVector truth;
  std::size_t n = 0;
  std::size_t n_replicates = 1;
  double covariate_p = 0.5;  // Bernoulli success probability of every covariate
  bool freeze_covariates = false;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument for a bad shape or a non-stationary /
  // non-invertible truth.
  void validate() const;
};

struct SimulatedPath {
  SeriesPanel panel;
  Eigen::MatrixXd u;  // innovations drawn along the path
};

// Simulates Y given covariates x (all rows), drawing sequentially from the
// conditional law. Rows before the maximum order are drawn around the
// regression mean with zero innovations recorded.
SimulatedPath simulate_path(const ModelSpec& spec, const ParamVector& truth,
                            const Eigen::MatrixXd& x, std::mt19937_64& rng);

std::size_t burn_in(const ModelSpec& spec);

// Panel for one replicate: burn_in(spec) + n rows simulated, last n kept.
SeriesPanel generate_panel(const McScenario& scenario, std::size_t replicate = 0);

struct McReport {
  McScenario scenario;
  std::vector<std::string> names;
  Eigen::VectorXd truth;
  Eigen::VectorXd mean;
  Eigen::VectorXd bias;
  Eigen::VectorXd mse;
  std::size_t n_converged = 0;
  std::size_t n_failed = 0;
};

// Fits every replicate with em_fit; non-converged or failed replicates are
// excluded from the averages and counted in n_failed.
McReport run_study(const McScenario& scenario, const EmSettings& settings = {});

// Reports must share the model and be ordered by increasing n. True when each
// parameter's MSE never grows by more than 20% between consecutive sizes and
// ends below where it started.
bool mse_trend_check(const std::vector<McReport>& reports);

// MBSARMA(1,1) truths used throughout the simulation grids.
McScenario bivariate_scenario(double rho, std::size_t n, std::size_t n_replicates,
                              std::uint64_t seed);
McScenario trivariate_scenario(double rho, std::size_t n, std::size_t n_replicates,
                               std::uint64_t seed);

}  // namespace mbsarma

#endif  // MBSARMA_MCSTUDY_HPP_

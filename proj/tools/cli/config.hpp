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

#ifndef MBSARMA_TOOLS_CLI_CONFIG_HPP_
#define MBSARMA_TOOLS_CLI_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbsarma/estimation.hpp"
#include "mbsarma/forecasting.hpp"
#include "mbsarma/model.hpp"

namespace mbsarma::cli {

struct DataConfig {
  std::string path;
  std::string time_column;  // optional
  std::vector<std::string> responses;
  std::vector<std::string> covariates;
  bool log_transform = true;
  int harmonic_period = 0;  // 0 disables the harmonic covariate builder
};

struct DiagnoseConfig {
  int n_sim = 100;
  double level = 0.95;
  std::size_t max_lag = 12;
};

struct SimulateConfig {
  std::size_t n = 0;
  ParamVector truth;
  std::string covariates = "bernoulli";  // or "harmonic"
  int period = 52;
  double covariate_p = 0.5;
  std::vector<std::string> response_names;
  std::string output = "simulated.csv";
};

struct McConfig {
  std::string scenario;  // "bivariate", "trivariate" or "custom"
  double rho = 0.5;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 100;
  bool freeze_covariates = false;
  std::optional<ParamVector> truth;  // for "custom"
};

struct RunConfig {
  DataConfig data;
  ModelSpec spec;
  bool has_spec = false;
  std::vector<std::size_t> p_grid{0, 1, 2};
  std::vector<std::size_t> q_grid{0, 1, 2};
  EmSettings em;
  std::size_t test_len = 0;
  std::size_t horizon = 0;
  NaiveMode naive_mode = NaiveMode::kRolling;
  DiagnoseConfig diagnose;
  SimulateConfig simulate;
  McConfig mc;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  bool full_precision = false;
};

// Parse errors surface as ParseError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

ParamVector parse_truth(const ModelSpec& spec, const nlohmann::json& doc);
nlohmann::json truth_to_json(const ParamVector& params);

}  // namespace mbsarma::cli

#endif  // MBSARMA_TOOLS_CLI_CONFIG_HPP_

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

#ifndef MBSARMA_TOOLS_CLI_COMMANDS_HPP_
#define MBSARMA_TOOLS_CLI_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cli/config.hpp"
#include "mbsarma/model.hpp"

namespace mbsarma::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kNotConverged = 3,
  kDegenerateData = 4,
};

// Rows for t = first, ..., first + count - 1 (1-based time index): trend t/n,
// then sin/cos at one and two cycles per period.
Eigen::MatrixXd harmonic_covariates(long first, std::size_t count, std::size_t n, int period);
std::vector<std::string> harmonic_names();

struct LoadedData {
  SeriesPanel panel;
  std::vector<std::string> time_labels;
  std::vector<std::string> response_names;
  std::vector<std::string> covariate_names;
  std::vector<std::string> warnings;
};

LoadedData load_data(const DataConfig& config);

int cmd_fit(const RunConfig& config, std::ostream& out);
int cmd_select(const RunConfig& config, std::ostream& out);
int cmd_diagnose(const RunConfig& config, std::ostream& out);
int cmd_forecast(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_mc(const RunConfig& config, std::ostream& out);

}  // namespace mbsarma::cli

#endif  // MBSARMA_TOOLS_CLI_COMMANDS_HPP_

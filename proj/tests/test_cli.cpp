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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"

namespace fs = std::filesystem;
using namespace mbsarma::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mbsarma_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json simulate_doc(const fs::path& dir) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "model": {"d": 2, "k": 5, "p": 1, "q": 0},
    "simulate": {
      "n": 150, "covariates": "harmonic", "period": 52,
      "response_names": ["a", "b"], "output": "sim.csv",
      "truth": {
        "alpha": 0.3,
        "components": [
          {"phi": [0.4], "eta": 2.0, "beta": [0.1, 0.2, -0.1, 0.05, 0.0]},
          {"phi": [0.3], "eta": 2.5, "beta": [0.0, -0.2, 0.1, 0.0, 0.05]}
        ],
        "psi_lower": [0.5]
      }
    },
    "seed": 11
  })");
  doc["output_dir"] = dir.string();
  return doc;
}

nlohmann::json fit_doc(const fs::path& dir) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "data": {"time_column": "t", "responses": ["a", "b"], "harmonic_period": 52},
    "model": {"p": 1, "q": 0},
    "test_len": 10,
    "horizon": 3,
    "seed": 1
  })");
  doc["data"]["path"] = (dir / "sim.csv").string();
  doc["output_dir"] = dir.string();
  return doc;
}

}  // namespace

TEST_CASE("simulate then fit round trip") {
  const fs::path dir = scratch("roundtrip");
  std::ostringstream log;
  REQUIRE(cmd_simulate(parse_config(simulate_doc(dir)), log) == kOk);
  const CsvTable sim = read_csv((dir / "sim.csv").string());
  CHECK(sim.rows.size() == 150);
  CHECK(sim.numeric_column("a").minCoeff() > 0.0);

  REQUIRE(cmd_fit(parse_config(fit_doc(dir)), log) == kOk);
  const CsvTable est = read_csv((dir / "fit_estimates.csv").string());
  CHECK(est.rows.size() == 16);
  const auto report = nlohmann::json::parse(slurp(dir / "fit_report.json"));
  CHECK(report["converged"].get<bool>());

  const auto values = est.numeric_column("estimate");
  const std::size_t name_col = est.column("parameter");
  for (std::size_t i = 0; i < est.rows.size(); ++i) {
    if (est.rows[i][name_col] == "alpha") {
      CHECK(std::abs(values[static_cast<Eigen::Index>(i)] - 0.3) < 0.06);
    }
  }

  CHECK(cmd_forecast(parse_config(fit_doc(dir)), log) == kOk);
  const CsvTable metrics = read_csv((dir / "forecast_metrics.csv").string());
  CHECK(metrics.rows.size() == 6);
  CHECK(cmd_diagnose(parse_config(fit_doc(dir)), log) == kOk);
  CHECK(fs::exists(dir / "qq_envelope.csv"));
  CHECK(fs::exists(dir / "acf_a.csv"));
}

TEST_CASE("test_len 0 writes a header-only metrics file") {
  const fs::path dir = scratch("nolen");
  std::ostringstream log;
  REQUIRE(cmd_simulate(parse_config(simulate_doc(dir)), log) == kOk);
  nlohmann::json doc = fit_doc(dir);
  doc["test_len"] = 0;
  doc["horizon"] = 0;
  REQUIRE(cmd_forecast(parse_config(doc), log) == kOk);
  const CsvTable metrics = read_csv((dir / "forecast_metrics.csv").string());
  CHECK(metrics.rows.empty());
  CHECK_FALSE(metrics.header.empty());
}

TEST_CASE("configuration errors") {
  const fs::path dir = scratch("errors");
  std::ostringstream log;
  REQUIRE(cmd_simulate(parse_config(simulate_doc(dir)), log) == kOk);
  nlohmann::json doc = fit_doc(dir);
  doc["data"]["responses"] = {"a", "missing"};
  CHECK_THROWS_AS(cmd_fit(parse_config(doc), log), ParseError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"model": {"p": -1}})")), ParseError);
  CHECK_THROWS_AS(read_csv((dir / "nope.csv").string()), ParseError);
}

#ifdef MBSARMA_CLI_BINARY
TEST_CASE("binary exit codes and byte-identical reruns") {
  const fs::path dir = scratch("binary");
  const std::string bin = MBSARMA_CLI_BINARY;
  {
    std::ofstream(dir / "sim.json") << simulate_doc(dir).dump();
    std::ofstream(dir / "fit.json") << fit_doc(dir).dump();
    nlohmann::json bad = fit_doc(dir);
    bad["data"]["responses"] = {"a", "missing"};
    std::ofstream(dir / "bad.json") << bad.dump();
  }
  auto run = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > " + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  REQUIRE(run("simulate -c " + (dir / "sim.json").string()) == 0);
  CHECK(run("fit -c " + (dir / "bad.json").string()) == 2);
  CHECK(run("fit -c " + (dir / "nothere.json").string()) == 2);
  REQUIRE(run("fit -c " + (dir / "fit.json").string()) == 0);
  const std::string first = slurp(dir / "fit_estimates.csv");
  REQUIRE(run("fit -c " + (dir / "fit.json").string()) == 0);
  CHECK(slurp(dir / "fit_estimates.csv") == first);
  REQUIRE(run("forecast -c " + (dir / "fit.json").string() + " --test-len 0") == 0);
  CHECK(read_csv((dir / "forecast_metrics.csv").string()).rows.empty());
}
#endif

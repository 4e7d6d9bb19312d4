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

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "mbsarma/errors.hpp"

namespace {

using mbsarma::cli::RunConfig;

struct Overrides {
  std::string config_path;
  std::string output_dir;
  long long seed = -1;
  long long test_len = -1;
  bool full_precision = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_path, "JSON run configuration")->required();
  sub->add_option("-o,--output-dir", o.output_dir, "directory for output files");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_flag("--full-precision", o.full_precision, "print 17 significant digits");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate Birnbaum-Saunders ARMA models"};
  app.require_subcommand(1);
  Overrides o;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, std::ostream&);
  };
  const Entry entries[] = {
      {"fit", "fit a model by EM and report estimates", mbsarma::cli::cmd_fit},
      {"select", "rank symmetric orders by BIC", mbsarma::cli::cmd_select},
      {"diagnose", "residual diagnostics for a fitted model", mbsarma::cli::cmd_diagnose},
      {"forecast", "rolling one-step evaluation and forecasts", mbsarma::cli::cmd_forecast},
      {"simulate", "simulate a panel from a truth", mbsarma::cli::cmd_simulate},
      {"mc", "Monte Carlo bias and MSE study", mbsarma::cli::cmd_mc},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, o);
    if (std::string(e.name) == "forecast") {
      sub->add_option("--test-len", o.test_len, "rows held out at the end");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mbsarma::cli::kConfigError;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  for (const auto& e : entries) {
    if (chosen->get_name() != e.name) continue;
    try {
      RunConfig config = mbsarma::cli::load_config(o.config_path);
      if (!o.output_dir.empty()) config.output_dir = o.output_dir;
      if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
      if (o.test_len >= 0) config.test_len = static_cast<std::size_t>(o.test_len);
      if (o.full_precision) config.full_precision = true;
      const int code = e.run(config, std::cout);
      if (code == mbsarma::cli::kNotConverged) std::cerr << "error: EM did not converge\n";
      return code;
    } catch (const mbsarma::cli::ParseError& ex) {
      std::cerr << "config/parse error: " << ex.what() << '\n';
      return mbsarma::cli::kConfigError;
    } catch (const mbsarma::DegenerateData& ex) {
      std::cerr << "degenerate data: " << ex.what() << '\n';
      return mbsarma::cli::kDegenerateData;
    } catch (const mbsarma::NotPositiveDefinite& ex) {
      std::cerr << "degenerate data: " << ex.what() << '\n';
      return mbsarma::cli::kDegenerateData;
    } catch (const std::invalid_argument& ex) {
      std::cerr << "config/parse error: " << ex.what() << '\n';
      return mbsarma::cli::kConfigError;
    } catch (const std::exception& ex) {
      std::cerr << "error: " << ex.what() << '\n';
      return mbsarma::cli::kFailure;
    }
  }
  return mbsarma::cli::kFailure;
}

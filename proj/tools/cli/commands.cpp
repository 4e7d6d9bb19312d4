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

#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "cli/csv.hpp"
#include "mbsarma/diagnostics.hpp"
#include "mbsarma/estimation.hpp"
#include "mbsarma/forecasting.hpp"
#include "mbsarma/mcstudy.hpp"

namespace mbsarma::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.output_dir);
  return (fs::path(config.output_dir) / name).string();
}

void check_spec(const RunConfig& config, const LoadedData& data) {
  if (!config.has_spec) throw ParseError("config needs a model section");
  if (config.spec.d != data.panel.d() || config.spec.k != data.panel.k()) {
    throw ParseError("model dimensions (d=" + std::to_string(config.spec.d) +
                     ", k=" + std::to_string(config.spec.k) +
                     ") do not match the data (d=" + std::to_string(data.panel.d()) +
                     ", k=" + std::to_string(data.panel.k()) + ")");
  }
  try {
    config.spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

std::string time_label(const LoadedData& data, std::size_t row) {
  return data.time_labels.empty() ? std::to_string(row + 1) : data.time_labels[row];
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& out) {
  for (const auto& w : warnings) out << "warning: " << w << '\n';
}

std::string num(double v, const RunConfig& config) {
  return format_number(v, config.full_precision);
}

void write_estimates(const RunConfig& config, const FitResult& fit, const std::string& file) {
  const auto names = ParamVector::names(fit.spec);
  const Eigen::VectorXd est = fit.estimates.flatten();
  const Eigen::VectorXd se = fit.std_errors.flatten();
  CsvWriter csv(out_path(config, file), {"parameter", "estimate", "se"}, config.full_precision);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    csv.cell(names[i]).cell(est[idx]).cell(se[idx]);
    csv.end_row();
  }
}

json fit_report(const FitResult& fit) {
  json report;
  report["model"] = fit.spec.label();
  report["loglik"] = fit.loglik;
  report["bic"] = fit.bic;
  report["kappa"] = fit.spec.free_parameters();
  report["effective_n"] = fit.effective_n;
  report["em_iterations"] = fit.em_iterations;
  report["converged"] = fit.converged;
  report["information_pd"] = fit.information_pd;
  report["estimates"] = truth_to_json(fit.estimates);
  json roots = json::array();
  for (const auto& r : fit.root_report) {
    roots.push_back({{"ar_stationary", r.ar_stationary},
                     {"ma_invertible", r.ma_invertible},
                     {"min_ar_root_modulus", r.min_ar_root_modulus},
                     {"min_ma_root_modulus", r.min_ma_root_modulus}});
  }
  report["roots"] = roots;
  report["warnings"] = fit.warnings;
  return report;
}

FitResult fit_panel(const RunConfig& config, const LoadedData& data, const SeriesPanel& panel,
                    std::ostream& out) {
  check_spec(config, data);
  FitResult fit = em_fit(config.spec, panel, config.em);
  print_warnings(data.warnings, out);
  print_warnings(fit.warnings, out);
  return fit;
}

}  // namespace

Eigen::MatrixXd harmonic_covariates(long first, std::size_t count, std::size_t n, int period) {
  if (period <= 0) throw ParseError("harmonic period must be positive");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(count), 5);
  const double w = 2.0 * std::numbers::pi / period;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto t = static_cast<double>(first + r);
    x(r, 0) = t / static_cast<double>(n);
    x(r, 1) = std::sin(w * t);
    x(r, 2) = std::cos(w * t);
    x(r, 3) = std::sin(2.0 * w * t);
    x(r, 4) = std::cos(2.0 * w * t);
  }
  return x;
}

std::vector<std::string> harmonic_names() {
  return {"trend", "sin1", "cos1", "sin2", "cos2"};
}

LoadedData load_data(const DataConfig& config) {
  if (config.path.empty()) throw ParseError("data.path is required");
  if (config.responses.empty()) throw ParseError("data.responses must name at least one column");
  const CsvTable table = read_csv(config.path);
  LoadedData data;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  data.panel.y.resize(n, static_cast<Eigen::Index>(config.responses.size()));
  for (std::size_t j = 0; j < config.responses.size(); ++j) {
    data.panel.y.col(static_cast<Eigen::Index>(j)) = table.numeric_column(config.responses[j]);
  }
  data.response_names = config.responses;
  if (config.log_transform) {
    if ((data.panel.y.array() <= 0.0).any()) {
      throw ParseError("log_transform requires strictly positive responses");
    }
    data.panel.y = data.panel.y.array().log().matrix();
  }
  const std::size_t k_cols = config.covariates.size();
  const std::size_t k = k_cols + (config.harmonic_period > 0 ? 5 : 0);
  data.panel.x.resize(n, static_cast<Eigen::Index>(k));
  for (std::size_t l = 0; l < k_cols; ++l) {
    data.panel.x.col(static_cast<Eigen::Index>(l)) = table.numeric_column(config.covariates[l]);
  }
  data.covariate_names = config.covariates;
  if (config.harmonic_period > 0) {
    data.panel.x.rightCols(5) =
        harmonic_covariates(1, static_cast<std::size_t>(n), static_cast<std::size_t>(n),
                            config.harmonic_period);
    for (const auto& name : harmonic_names()) data.covariate_names.push_back(name);
  }
  if (!config.time_column.empty()) {
    const std::size_t c = table.column(config.time_column);
    for (const auto& row : table.rows) data.time_labels.push_back(row[c]);
  }
  for (Eigen::Index l = 0; l < data.panel.x.cols(); ++l) {
    if (n > 0 && data.panel.x.col(l).maxCoeff() == data.panel.x.col(l).minCoeff()) {
      data.warnings.push_back("covariate '" + data.covariate_names[static_cast<std::size_t>(l)] +
                              "' is constant; the intercepts already absorb it");
    }
  }
  return data;
}

int cmd_fit(const RunConfig& config, std::ostream& out) {
  const LoadedData data = load_data(config.data);
  const FitResult fit = fit_panel(config, data, data.panel, out);

  write_estimates(config, fit, "fit_estimates.csv");
  {
    CsvWriter csv(out_path(config, "fit_trace.csv"), {"iteration", "loglik"},
                  config.full_precision);
    for (std::size_t i = 0; i < fit.em_trace.size(); ++i) {
      csv.cell(static_cast<long long>(i)).cell(fit.em_trace[i]);
      csv.end_row();
    }
  }
  std::ofstream(out_path(config, "fit_report.json")) << fit_report(fit).dump(2) << '\n';

  out << fit.spec.label() << "  n-m=" << fit.effective_n << '\n';
  const auto names = ParamVector::names(fit.spec);
  const Eigen::VectorXd est = fit.estimates.flatten();
  const Eigen::VectorXd se = fit.std_errors.flatten();
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out << names[i] << '\t' << num(est[idx], config) << '\t' << num(se[idx], config) << '\n';
  }
  out << "loglik\t" << num(fit.loglik, config) << "\nkappa\t" << fit.spec.free_parameters()
      << "\nBIC\t" << num(fit.bic, config) << "\nEM iterations\t" << fit.em_iterations << '\n';
  return fit.converged ? kOk : kNotConverged;
}

int cmd_select(const RunConfig& config, std::ostream& out) {
  const LoadedData data = load_data(config.data);
  print_warnings(data.warnings, out);
  std::vector<ModelSpec> candidates;
  for (std::size_t p : config.p_grid) {
    for (std::size_t q : config.q_grid) {
      candidates.push_back(ModelSpec::symmetric(data.panel.d(), data.panel.k(), p, q));
    }
  }
  if (candidates.empty()) throw ParseError("select grid is empty");
  EmSettings settings = config.em;
  settings.compute_std_errors = false;
  const auto ranked = select_by_bic(data.panel, candidates, settings);

  CsvWriter csv(out_path(config, "select_ranking.csv"),
                {"rank", "model", "loglik", "kappa", "effective_n", "bic", "converged", "error"},
                config.full_precision);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    csv.cell(static_cast<long long>(i + 1)).cell(r.spec.label());
    if (r.fit) {
      csv.cell(r.fit->loglik)
          .cell(static_cast<long long>(r.spec.free_parameters()))
          .cell(static_cast<long long>(r.fit->effective_n))
          .cell(r.bic)
          .cell(std::string(r.fit->converged ? "true" : "false"))
          .cell(std::string());
    } else {
      csv.cell(std::nan("")).cell(static_cast<long long>(r.spec.free_parameters()));
      csv.cell(std::string("NA")).cell(std::nan("")).cell(std::string("false"));
      std::string msg = r.error;
      for (auto& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      csv.cell(msg);
    }
    csv.end_row();
    out << i + 1 << '\t' << r.spec.label() << '\t'
        << (r.fit ? num(r.bic, config) : "failed: " + r.error) << '\n';
  }
  return kOk;
}

int cmd_diagnose(const RunConfig& config, std::ostream& out) {
  const LoadedData data = load_data(config.data);
  const FitResult fit = fit_panel(config, data, data.panel, out);
  const ResidualSet res = residuals(fit, data.panel);
  const int dof = static_cast<int>(fit.spec.d);
  {
    CsvWriter csv(out_path(config, "residuals_d2.csv"), {"t", "d2"}, config.full_precision);
    for (Eigen::Index i = 0; i < res.d2.size(); ++i) {
      csv.cell(time_label(data, res.first_index + static_cast<std::size_t>(i))).cell(res.d2[i]);
      csv.end_row();
    }
  }
  {
    const auto rows =
        qq_envelope(res.d2, dof, config.diagnose.n_sim, config.diagnose.level, config.seed);
    CsvWriter csv(out_path(config, "qq_envelope.csv"),
                  {"theoretical_quantile", "observed", "lower", "upper"}, config.full_precision);
    for (const auto& r : rows) {
      csv.cell(r.theoretical).cell(r.observed).cell(r.lower).cell(r.upper);
      csv.end_row();
    }
  }
  const std::size_t max_lag =
      std::min<std::size_t>(config.diagnose.max_lag, static_cast<std::size_t>(res.a.rows()) - 1);
  std::vector<LjungBoxResult> lb;
  for (Eigen::Index j = 0; j < res.a.cols(); ++j) {
    const Eigen::VectorXd series = res.a.col(j);
    const Eigen::VectorXd r = acf(series, max_lag);
    const Eigen::VectorXd pr = pacf(series, max_lag);
    CsvWriter csv(out_path(config, "acf_" + data.response_names[static_cast<std::size_t>(j)] +
                                       ".csv"),
                  {"lag", "acf", "pacf"}, config.full_precision);
    for (std::size_t h = 1; h <= max_lag; ++h) {
      csv.cell(static_cast<long long>(h))
          .cell(r[static_cast<Eigen::Index>(h)])
          .cell(pr[static_cast<Eigen::Index>(h) - 1]);
      csv.end_row();
    }
    lb.push_back(ljung_box(series, max_lag));
  }
  const KsResult ks = ks_test_chi2(res.d2, dof);
  CsvWriter csv(out_path(config, "diagnostics_summary.csv"), {"test", "target", "statistic", "p_value"},
                config.full_precision);
  csv.cell(std::string("ks_chi2")).cell("d2").cell(ks.statistic).cell(ks.p_value);
  csv.end_row();
  out << "mean D2\t" << num(res.d2.mean(), config) << '\n';
  out << "KS D\t" << num(ks.statistic, config) << "\tp\t" << num(ks.p_value, config) << '\n';
  for (std::size_t j = 0; j < lb.size(); ++j) {
    csv.cell("ljung_box_" + std::to_string(lb[j].lags))
        .cell(data.response_names[j])
        .cell(lb[j].statistic)
        .cell(lb[j].p_value);
    csv.end_row();
    out << "Ljung-Box(" << lb[j].lags << ") " << data.response_names[j] << '\t'
        << num(lb[j].statistic, config) << "\tp\t" << num(lb[j].p_value, config) << '\n';
  }
  return fit.converged ? kOk : kNotConverged;
}

int cmd_forecast(const RunConfig& config, std::ostream& out) {
  const LoadedData data = load_data(config.data);
  const std::size_t n = data.panel.n();
  if (config.test_len >= n) throw ParseError("test_len must be smaller than the sample size");
  const SeriesPanel train = data.panel.head(n - config.test_len);
  const FitResult fit = fit_panel(config, data, train, out);

  Eigen::MatrixXd future_x(static_cast<Eigen::Index>(config.horizon),
                           static_cast<Eigen::Index>(fit.spec.k));
  if (config.horizon > 0 && fit.spec.k > 0) {
    if (config.data.harmonic_period <= 0 || !config.data.covariates.empty()) {
      throw ParseError("horizon > 0 needs covariates built by the harmonic builder, or k = 0");
    }
    future_x = harmonic_covariates(static_cast<long>(n) + 1, config.horizon, n,
                                   config.data.harmonic_period);
  }

  const EvalResult model = rolling_one_step_eval(fit, data.panel, config.test_len);
  const EvalResult naive = naive_eval(data.panel, config.test_len, config.naive_mode);
  const EvalResult armax =
      gaussian_armax_benchmark(fit.spec, data.panel, config.test_len, config.em);

  {
    CsvWriter csv(out_path(config, "forecast.csv"), {"t", "component", "y_obs", "y_hat", "t_hat"},
                  config.full_precision);
    for (Eigen::Index i = 0; i < model.predicted.rows(); ++i) {
      for (Eigen::Index j = 0; j < model.predicted.cols(); ++j) {
        csv.cell(time_label(data, model.first_index + static_cast<std::size_t>(i)))
            .cell(data.response_names[static_cast<std::size_t>(j)])
            .cell(model.observed(i, j))
            .cell(model.predicted(i, j))
            .cell(std::exp(model.predicted(i, j)));
        csv.end_row();
      }
    }
    if (config.horizon > 0) {
      const ForecastResult ahead = forecast(fit, data.panel, future_x, config.horizon);
      for (Eigen::Index h = 0; h < ahead.y_hat.rows(); ++h) {
        for (Eigen::Index j = 0; j < ahead.y_hat.cols(); ++j) {
          csv.cell(std::to_string(n + static_cast<std::size_t>(h) + 1))
              .cell(data.response_names[static_cast<std::size_t>(j)])
              .cell(std::string())
              .cell(ahead.y_hat(h, j))
              .cell(ahead.t_hat(h, j));
          csv.end_row();
        }
      }
    }
  }

  CsvWriter csv(out_path(config, "forecast_metrics.csv"), {"method", "component", "rmse", "mae"},
                config.full_precision);
  const std::pair<const char*, const EvalResult*> methods[] = {
      {"mbsarma", &model}, {"naive", &naive}, {"gaussian_armax", &armax}};
  for (const auto& [name, eval] : methods) {
    for (std::size_t j = 0; j < eval->metrics.size(); ++j) {
      csv.cell(std::string(name))
          .cell(data.response_names[j])
          .cell(eval->metrics[j].rmse)
          .cell(eval->metrics[j].mae);
      csv.end_row();
      out << name << '\t' << data.response_names[j] << "\tRMSE " << num(eval->metrics[j].rmse, config)
          << "\tMAE " << num(eval->metrics[j].mae, config) << '\n';
    }
  }
  return fit.converged ? kOk : kNotConverged;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const auto& sim = config.simulate;
  if (sim.n == 0) throw ParseError("simulate.n must be positive");
  const ModelSpec& spec = config.spec;
  McScenario check;
  check.spec = spec;
  check.truth = sim.truth;
  check.n = sim.n;
  try {
    check.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("simulate: ") + e.what());
  }
  const std::size_t burn = burn_in(spec);
  const std::size_t total = burn + sim.n;
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32)};
  std::mt19937_64 rng(seq);

  Eigen::MatrixXd x;
  std::vector<std::string> x_names;
  if (sim.covariates == "harmonic") {
    x = harmonic_covariates(1 - static_cast<long>(burn), total, sim.n, sim.period);
    x_names = harmonic_names();
  } else {
    std::bernoulli_distribution coin(sim.covariate_p);
    x.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(spec.k));
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      for (Eigen::Index l = 0; l < x.cols(); ++l) x(t, l) = coin(rng) ? 1.0 : 0.0;
    }
    for (std::size_t l = 0; l < spec.k; ++l) x_names.push_back("x" + std::to_string(l + 1));
  }
  const SimulatedPath path = simulate_path(spec, sim.truth, x, rng);
  const auto keep = static_cast<Eigen::Index>(sim.n);
  const Eigen::MatrixXd y = path.panel.y.bottomRows(keep);
  const Eigen::MatrixXd xs = x.bottomRows(keep);

  std::vector<std::string> y_names = sim.response_names;
  if (y_names.empty()) {
    for (std::size_t j = 0; j < spec.d; ++j) y_names.push_back("y" + std::to_string(j + 1));
  }
  if (y_names.size() != spec.d) throw ParseError("simulate.response_names needs d entries");
  std::vector<std::string> header{"t"};
  header.insert(header.end(), y_names.begin(), y_names.end());
  header.insert(header.end(), x_names.begin(), x_names.end());

  const std::string path_out =
      fs::path(sim.output).is_absolute() ? sim.output : out_path(config, sim.output);
  CsvWriter csv(path_out, header, true);
  for (Eigen::Index t = 0; t < keep; ++t) {
    csv.cell(static_cast<long long>(t + 1));
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      csv.cell(config.data.log_transform ? std::exp(y(t, j)) : y(t, j));
    }
    for (Eigen::Index l = 0; l < xs.cols(); ++l) csv.cell(xs(t, l));
    csv.end_row();
  }
  out << "wrote " << keep << " rows to " << path_out << '\n';
  return kOk;
}

int cmd_mc(const RunConfig& config, std::ostream& out) {
  const auto& mc = config.mc;
  if (mc.sizes.empty()) throw ParseError("config needs an mc section");
  std::vector<McReport> reports;
  for (std::size_t n : mc.sizes) {
    McScenario scenario;
    if (mc.scenario == "bivariate") {
      scenario = bivariate_scenario(mc.rho, n, mc.replicates, config.seed);
    } else if (mc.scenario == "trivariate") {
      scenario = trivariate_scenario(mc.rho, n, mc.replicates, config.seed);
    } else {
      scenario.spec = config.spec;
      scenario.truth = *mc.truth;
      scenario.n = n;
      scenario.n_replicates = mc.replicates;
      scenario.seed = config.seed;
    }
    scenario.freeze_covariates = mc.freeze_covariates;
    try {
      scenario.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("mc: ") + e.what());
    }
    reports.push_back(run_study(scenario, config.em));
    out << "n=" << n << " converged " << reports.back().n_converged << "/" << mc.replicates
        << '\n';
  }

  std::vector<std::string> header{"n", "row"};
  for (const auto& name : reports.front().names) header.push_back(name);
  header.push_back("n_converged");
  CsvWriter csv(out_path(config, "mc_table.csv"), header, config.full_precision);
  auto emit = [&](std::size_t n, const char* label, const Eigen::VectorXd& values,
                  std::size_t converged) {
    csv.cell(static_cast<long long>(n)).cell(std::string(label));
    for (Eigen::Index i = 0; i < values.size(); ++i) csv.cell(values[i]);
    csv.cell(static_cast<long long>(converged));
    csv.end_row();
  };
  emit(0, "True", reports.front().truth, 0);
  for (const auto& r : reports) {
    emit(r.scenario.n, "Bias", r.bias, r.n_converged);
    emit(r.scenario.n, "MSE", r.mse, r.n_converged);
  }
  if (reports.size() >= 3) {
    out << "MSE decreasing in n: " << (mse_trend_check(reports) ? "yes" : "no") << '\n';
  }
  return kOk;
}

}  // namespace mbsarma::cli

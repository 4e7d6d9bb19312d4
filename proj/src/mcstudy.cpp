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

#include "mbsarma/mcstudy.hpp"

#include <cmath>
#include <stdexcept>

#include "mbsarma/distributions.hpp"
#include "mbsarma/errors.hpp"
#include "mbsarma/parallel.hpp"

namespace mbsarma {

namespace {

constexpr std::uint64_t kCovariateStream = 0x636f76;

Eigen::MatrixXd bernoulli_covariates(std::size_t rows, std::size_t k, double p,
                                     std::mt19937_64& rng) {
  std::bernoulli_distribution draw(p);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(k));
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    for (Eigen::Index l = 0; l < x.cols(); ++l) x(t, l) = draw(rng) ? 1.0 : 0.0;
  }
  return x;
}

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

ParamVector symmetric_truth(const ModelSpec& spec, const std::vector<double>& phi, double rho) {
  ParamVector truth = ParamVector::zeros(spec);
  truth.alpha = 0.5;
  for (std::size_t j = 0; j < spec.d; ++j) {
    truth.components[j].phi = {phi[j]};
    truth.components[j].theta = {0.1};
    truth.components[j].beta = {0.3};
    truth.components[j].eta = 1.2;
  }
  truth.psi_lower.assign(spec.correlation_size(), rho);
  return truth;
}

}  // namespace

void McScenario::validate() const {
  spec.validate();
  truth.check_shape(spec);
  if (n <= spec.start() + 1) throw std::invalid_argument("scenario n is too small");
  if (n_replicates == 0) throw std::invalid_argument("n_replicates must be positive");
  if (!(covariate_p >= 0.0 && covariate_p <= 1.0)) {
    throw std::invalid_argument("covariate_p must be a probability");
  }
  mbsarma::validate(MvLogBsParams{truth.alpha, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.d)),
                         truth.psi()});
  try {
    CholeskyFactor check(truth.psi());
  } catch (const NotPositiveDefinite&) {
    throw std::invalid_argument("scenario psi is not positive definite");
  }
  for (const auto& r : check_roots(spec, truth)) {
    if (!r.ar_stationary || !r.ma_invertible) {
      throw std::invalid_argument("scenario truth is not stationary and invertible");
    }
  }
}

std::size_t burn_in(const ModelSpec& spec) { return 100 + spec.max_order(); }

SimulatedPath simulate_path(const ModelSpec& spec, const ParamVector& truth,
                            const Eigen::MatrixXd& x, std::mt19937_64& rng) {
  truth.check_shape(spec);
  const auto rows = x.rows();
  const auto d = static_cast<Eigen::Index>(spec.d);
  const auto m = static_cast<Eigen::Index>(spec.max_order());
  if (x.cols() != static_cast<Eigen::Index>(spec.k)) {
    throw std::invalid_argument("covariate columns do not match spec.k");
  }
  const CholeskyFactor factor(truth.psi());
  const Eigen::MatrixXd lower = factor.lower();
  std::normal_distribution<double> normal;

  SimulatedPath path;
  path.panel.x = x;
  path.panel.y.resize(rows, d);
  path.u = Eigen::MatrixXd::Zero(rows, d);
  Eigen::MatrixXd regression(rows, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& c = truth.components[static_cast<std::size_t>(j)];
    const Eigen::Map<const Eigen::VectorXd> beta(c.beta.data(), x.cols());
    regression.col(j) = x.cols() > 0 ? (x * beta).eval() : Eigen::VectorXd::Zero(rows);
  }

  Eigen::VectorXd e(d);
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) e[j] = normal(rng);
    const Eigen::VectorXd z = lower * e;
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto& c = truth.components[static_cast<std::size_t>(j)];
      double mu = c.eta + regression(t, j);
      if (t >= m) {
        for (std::size_t i = 1; i <= c.phi.size(); ++i) {
          const Eigen::Index lag = t - static_cast<Eigen::Index>(i);
          mu += c.phi[i - 1] * (path.panel.y(lag, j) - regression(lag, j));
        }
        for (std::size_t l = 1; l <= c.theta.size(); ++l) {
          mu += c.theta[l - 1] * path.u(t - static_cast<Eigen::Index>(l), j);
        }
      }
      const double eps = 2.0 * std::asinh(0.5 * truth.alpha * z[j]);
      path.panel.y(t, j) = mu + eps;
      if (t >= m) path.u(t, j) = path.panel.y(t, j) - mu;
    }
  }
  return path;
}

SeriesPanel generate_panel(const McScenario& scenario, std::size_t replicate) {
  const std::size_t burn = burn_in(scenario.spec);
  const std::size_t total = burn + scenario.n;
  std::mt19937_64 rng = replicate_rng(scenario.seed, replicate);
  Eigen::MatrixXd x;
  if (scenario.freeze_covariates) {
    std::mt19937_64 xrng = replicate_rng(scenario.seed, kCovariateStream);
    x = bernoulli_covariates(total, scenario.spec.k, scenario.covariate_p, xrng);
  } else {
    x = bernoulli_covariates(total, scenario.spec.k, scenario.covariate_p, rng);
  }
  const SimulatedPath path = simulate_path(scenario.spec, scenario.truth, x, rng);
  const auto keep = static_cast<Eigen::Index>(scenario.n);
  SeriesPanel out;
  out.y = path.panel.y.bottomRows(keep);
  out.x = path.panel.x.bottomRows(keep);
  return out;
}

McReport run_study(const McScenario& scenario, const EmSettings& settings) {
  scenario.validate();
  EmSettings fit_settings = settings;
  fit_settings.compute_std_errors = false;

  const Eigen::VectorXd truth = scenario.truth.flatten();
  const Eigen::Index width = truth.size();
  const std::size_t reps = scenario.n_replicates;
  Eigen::MatrixXd estimates(static_cast<Eigen::Index>(reps), width);
  std::vector<char> ok(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    try {
      const SeriesPanel panel = generate_panel(scenario, r);
      const FitResult fit = em_fit(scenario.spec, panel, fit_settings);
      if (fit.converged) {
        estimates.row(static_cast<Eigen::Index>(r)) = fit.estimates.flatten().transpose();
        ok[r] = 1;
      }
    } catch (const std::exception&) {
      ok[r] = 0;
    }
  });

  McReport report;
  report.scenario = scenario;
  report.names = ParamVector::names(scenario.spec);
  report.truth = truth;
  report.mean = Eigen::VectorXd::Zero(width);
  report.mse = Eigen::VectorXd::Zero(width);
  for (std::size_t r = 0; r < reps; ++r) {
    if (!ok[r]) continue;
    const Eigen::VectorXd est = estimates.row(static_cast<Eigen::Index>(r)).transpose();
    report.mean += est;
    report.mse += (est - truth).cwiseAbs2();
    ++report.n_converged;
  }
  report.n_failed = reps - report.n_converged;
  if (report.n_converged > 0) {
    const auto count = static_cast<double>(report.n_converged);
    report.mean /= count;
    report.mse /= count;
  } else {
    report.mean.setConstant(std::nan(""));
    report.mse.setConstant(std::nan(""));
  }
  report.bias = report.mean - truth;
  return report;
}

bool mse_trend_check(const std::vector<McReport>& reports) {
  if (reports.size() < 3) throw std::invalid_argument("mse_trend_check needs at least 3 sizes");
  const Eigen::Index width = reports.front().mse.size();
  for (const auto& r : reports) {
    if (r.mse.size() != width) throw std::invalid_argument("reports have different parameters");
  }
  for (Eigen::Index i = 0; i < width; ++i) {
    for (std::size_t s = 1; s < reports.size(); ++s) {
      if (!(reports[s].mse[i] <= 1.2 * reports[s - 1].mse[i])) return false;
    }
    if (!(reports.back().mse[i] < reports.front().mse[i])) return false;
  }
  return true;
}

McScenario bivariate_scenario(double rho, std::size_t n, std::size_t n_replicates,
                              std::uint64_t seed) {
  McScenario s;
  s.spec = ModelSpec::symmetric(2, 1, 1, 1);
  s.truth = symmetric_truth(s.spec, {0.5, 0.7}, rho);
  s.n = n;
  s.n_replicates = n_replicates;
  s.seed = seed;
  return s;
}

McScenario trivariate_scenario(double rho, std::size_t n, std::size_t n_replicates,
                               std::uint64_t seed) {
  McScenario s;
  s.spec = ModelSpec::symmetric(3, 1, 1, 1);
  s.truth = symmetric_truth(s.spec, {0.5, 0.7, 0.6}, rho);
  s.n = n;
  s.n_replicates = n_replicates;
  s.seed = seed;
  return s;
}

}  // namespace mbsarma

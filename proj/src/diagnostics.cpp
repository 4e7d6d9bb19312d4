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

#include "mbsarma/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "mbsarma/distributions.hpp"

namespace mbsarma {

namespace {

// Type-7 sample quantile of sorted data.
double sorted_quantile(const std::vector<double>& sorted, double prob) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ResidualSet residuals(const ModelSpec& spec, const ParamVector& params,
                      const SeriesPanel& panel) {
  params.check_shape(spec);
  panel.check(spec);
  const LocationState state = compute_locations(spec, params, panel);
  const auto s0 = static_cast<Eigen::Index>(state.valid_from);
  const Eigen::Index rows = panel.y.rows() - s0;
  ResidualSet out;
  out.first_index = state.valid_from;
  out.a = (2.0 / params.alpha) * (0.5 * state.u.bottomRows(rows)).array().sinh().matrix();
  const Eigen::MatrixXd psi = params.psi();
  out.sigma_hat = 0.25 * params.alpha * params.alpha * psi;
  const CholeskyFactor factor(psi);
  out.d2.resize(rows);
  for (Eigen::Index t = 0; t < rows; ++t) {
    out.d2[t] = factor.quad_form(out.a.row(t).transpose());
  }
  return out;
}

ResidualSet residuals(const FitResult& fit, const SeriesPanel& panel) {
  return residuals(fit.spec, fit.estimates, panel);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) {
    // Theta-function form converges fast for small lambda.
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k <= 50; k += 2) cdf += std::exp(-static_cast<double>(k * k) * c);
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_chi2(const Eigen::VectorXd& d2, int dof) {
  if (dof < 1) throw std::invalid_argument("dof must be at least 1");
  if (d2.size() == 0) throw std::invalid_argument("d2 is empty");
  std::vector<double> sorted(d2.data(), d2.data() + d2.size());
  std::sort(sorted.begin(), sorted.end());
  const boost::math::chi_squared_distribution<double> law(dof);
  const auto n = static_cast<double>(sorted.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = sorted[i] <= 0.0 ? 0.0 : boost::math::cdf(law, sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    stat = std::max({stat, above, below});
  }
  KsResult out;
  out.statistic = stat;
  out.p_value = kolmogorov_survival(std::sqrt(n) * stat);
  return out;
}

Eigen::VectorXd acf(const Eigen::VectorXd& series, std::size_t max_lag) {
  const Eigen::Index n = series.size();
  if (static_cast<Eigen::Index>(max_lag) >= n) {
    throw std::invalid_argument("max_lag must be smaller than the series length");
  }
  const Eigen::VectorXd centered = series.array() - series.mean();
  const double c0 = centered.squaredNorm();
  if (!(c0 > 0.0)) throw std::domain_error("autocorrelation of a constant series");
  Eigen::VectorXd out(static_cast<Eigen::Index>(max_lag) + 1);
  for (Eigen::Index h = 0; h < out.size(); ++h) {
    out[h] = centered.head(n - h).dot(centered.tail(n - h)) / c0;
  }
  out[0] = 1.0;
  return out;
}

Eigen::VectorXd pacf(const Eigen::VectorXd& series, std::size_t max_lag) {
  const Eigen::VectorXd r = acf(series, max_lag);
  const auto lags = static_cast<Eigen::Index>(max_lag);
  Eigen::VectorXd out(lags);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(lags + 1);
  Eigen::VectorXd prev = phi;
  double v = 1.0;
  for (Eigen::Index k = 1; k <= lags; ++k) {
    double num = r[k];
    for (Eigen::Index j = 1; j < k; ++j) num -= prev[j] * r[k - j];
    const double kk = num / v;
    phi[k] = kk;
    for (Eigen::Index j = 1; j < k; ++j) phi[j] = prev[j] - kk * prev[k - j];
    v *= 1.0 - kk * kk;
    prev = phi;
    out[k - 1] = kk;
  }
  return out;
}

LjungBoxResult ljung_box(const Eigen::VectorXd& series, std::size_t lags) {
  if (lags == 0) throw std::invalid_argument("Ljung-Box needs at least one lag");
  const Eigen::VectorXd r = acf(series, lags);
  const auto n = static_cast<double>(series.size());
  double q = 0.0;
  for (std::size_t h = 1; h <= lags; ++h) {
    const double rh = r[static_cast<Eigen::Index>(h)];
    q += rh * rh / (n - static_cast<double>(h));
  }
  LjungBoxResult out;
  out.statistic = n * (n + 2.0) * q;
  out.lags = lags;
  out.p_value = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared_distribution<double>(
                                  static_cast<double>(lags)),
                              out.statistic));
  return out;
}

std::vector<QqRow> qq_envelope(const Eigen::VectorXd& d2, int dof, int n_sim, double level,
                               std::uint64_t seed) {
  if (dof < 1) throw std::invalid_argument("dof must be at least 1");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0, 1)");
  if (static_cast<double>(n_sim) < 2.0 / (1.0 - level) - 1e-9) {
    throw std::invalid_argument("n_sim must be at least 2/(1 - level)");
  }
  const auto count = static_cast<std::size_t>(d2.size());
  std::vector<double> observed(d2.data(), d2.data() + d2.size());
  std::sort(observed.begin(), observed.end());

  std::mt19937_64 rng(seed);
  std::chi_squared_distribution<double> draw(dof);
  std::vector<std::vector<double>> by_rank(count, std::vector<double>(static_cast<std::size_t>(n_sim)));
  std::vector<double> sample(count);
  for (int s = 0; s < n_sim; ++s) {
    for (auto& v : sample) v = draw(rng);
    std::sort(sample.begin(), sample.end());
    for (std::size_t i = 0; i < count; ++i) by_rank[i][static_cast<std::size_t>(s)] = sample[i];
  }

  const boost::math::chi_squared_distribution<double> law(dof);
  std::vector<QqRow> rows(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& ranks = by_rank[i];
    std::sort(ranks.begin(), ranks.end());
    const double pos = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    rows[i].theoretical = boost::math::quantile(law, pos);
    rows[i].observed = observed[i];
    rows[i].lower = sorted_quantile(ranks, 0.5 * (1.0 - level));
    rows[i].upper = sorted_quantile(ranks, 0.5 * (1.0 + level));
  }
  return rows;
}

}  // namespace mbsarma

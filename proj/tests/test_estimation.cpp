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

#include <cmath>
#include <numeric>
#include <random>

#include "mbsarma/distributions.hpp"
#include "mbsarma/errors.hpp"
#include "mbsarma/estimation.hpp"
#include "mbsarma/mcstudy.hpp"
#include "support/oracles.hpp"

using namespace mbsarma;

namespace {

// Bivariate ARMA(1,1) truth with rho = 0.5.
ParamVector arma11_truth() { return bivariate_scenario(0.5, 10, 1, 1).truth; }

double fd_score(const ModelSpec& spec, const ParamVector& p, const SeriesPanel& panel,
                Eigen::Index i, double h) {
  ParamVector lo = p, hi = p;
  Eigen::VectorXd g = p.dynamics();
  g[i] += h;
  hi.set_dynamics(g);
  g[i] -= 2.0 * h;
  lo.set_dynamics(g);
  return (q_function(spec, hi, panel) - q_function(spec, lo, panel)) / (2.0 * h);
}

}  // namespace

TEST_CASE("q_function differs from the log-likelihood by a constant") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  const SeriesPanel panel = testing::simulate(spec, arma11_truth(), 80, 4);
  std::mt19937_64 rng(1);
  const ParamVector a = testing::random_arma11_point(spec, rng);
  const ParamVector b = testing::random_arma11_point(spec, rng);
  const double dq = q_function(spec, a, panel) - q_function(spec, b, panel);
  const double dl = conditional_loglik(spec, a, panel) - conditional_loglik(spec, b, panel);
  CHECK(dq == doctest::Approx(dl).epsilon(1e-10));
}

TEST_CASE("q_function for a location-only univariate model") {
  const ModelSpec spec = ModelSpec::symmetric(1, 0, 0, 0);
  ParamVector p = ParamVector::zeros(spec);
  p.alpha = 0.4;
  p.components[0].eta = 0.1;
  SeriesPanel panel;
  panel.y = Eigen::Vector4d(0.3, -0.2, 0.5, 0.0);
  panel.x.resize(4, 0);
  double sum_log_kappa = 0.0, sum_s2 = 0.0;
  for (Eigen::Index t = 0; t < 4; ++t) {
    const double h = 0.5 * (panel.y(t, 0) - 0.1);
    sum_log_kappa += std::log(std::cosh(h));
    sum_s2 += std::sinh(h) * std::sinh(h);
  }
  const double expected = -2.0 * std::log(2.0 * std::numbers::pi) - 4.0 * std::log(0.4) +
                          sum_log_kappa - 2.0 / (0.16) * sum_s2;
  CHECK(q_function(spec, p, panel) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("closed_form_shape_corr") {
  ShapeCorr one = closed_form_shape_corr(Eigen::MatrixXd::Constant(1, 1, 0.09));
  CHECK(one.alpha == doctest::Approx(0.6));
  CHECK(one.psi(0, 0) == 1.0);
  ShapeCorr diag = closed_form_shape_corr(0.25 * Eigen::MatrixXd::Identity(3, 3));
  CHECK(diag.alpha == doctest::Approx(1.0));
  CHECK(diag.psi == Eigen::MatrixXd::Identity(3, 3));
  Eigen::Matrix2d r;
  r << 0.04, 0.02, 0.02, 0.04;
  ShapeCorr two = closed_form_shape_corr(r);
  CHECK(two.alpha == doctest::Approx(0.4));
  CHECK(two.psi(0, 1) == doctest::Approx(0.5));
  r(1, 1) = 0.0;
  CHECK_THROWS_AS(closed_form_shape_corr(r), DegenerateData);
}

TEST_CASE("exact shape/correlation update") {
  // For d = 2 the constrained maximizer is rho = 2 R12 / (R11 + R22) and
  // alpha = 2 sqrt(tr(R)/2).
  Eigen::Matrix2d r;
  r << 0.05, 0.018, 0.018, 0.02;
  EmInternals in;
  in.R = r;
  const ShapeCorr exact = m_step_shape_corr(in, ShapeCorrUpdate::kExact);
  CHECK(exact.psi(0, 1) == doctest::Approx(2.0 * 0.018 / 0.07).epsilon(1e-9));
  CHECK(exact.alpha == doctest::Approx(2.0 * std::sqrt(0.035)).epsilon(1e-9));
  const ShapeCorr closed = m_step_shape_corr(in, ShapeCorrUpdate::kClosedForm);
  CHECK(closed.psi(0, 1) == doctest::Approx(0.018 / std::sqrt(0.001)));

  // Equal diagonals: both agree.
  r << 0.04, 0.02, 0.02, 0.04;
  in.R = r;
  CHECK(m_step_shape_corr(in).psi(0, 1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(m_step_shape_corr(in).alpha == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("dynamics_score matches finite differences") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  const SeriesPanel panel = testing::simulate(spec, arma11_truth(), 60, 12);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const ParamVector p = testing::random_arma11_point(spec, rng);
    const Eigen::VectorXd g = dynamics_score(spec, p, panel);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double fd = fd_score(spec, p, panel, i, 1e-6);
      CHECK(std::abs(g[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("dynamics_score vanishes on a noiseless panel and is small at the truth") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 0, 1);
  ParamVector p = ParamVector::zeros(spec);
  p.alpha = 0.5;
  p.components[0] = {{}, {0.4}, {0.3}, 1.0};
  p.components[1] = {{}, {-0.2}, {0.1}, 2.0};
  p.psi_lower = {0.3};
  SeriesPanel panel;
  panel.x = (Eigen::VectorXd(6) << 1, 0, 0, 1, 1, 0).finished();
  panel.y.resize(6, 2);
  for (Eigen::Index t = 0; t < 6; ++t) {
    panel.y(t, 0) = 1.0 + 0.3 * panel.x(t, 0);
    panel.y(t, 1) = 2.0 + 0.1 * panel.x(t, 0);
  }
  CHECK(dynamics_score(spec, p, panel).cwiseAbs().maxCoeff() == 0.0);

  const ModelSpec arma = ModelSpec::symmetric(2, 1, 1, 1);
  const ParamVector truth = arma11_truth();
  const SeriesPanel big = testing::simulate(arma, truth, 10000, 21);
  // The per-step score norm has sd near 11 here, so the average over 1e4
  // steps is typically about 0.11.
  CHECK(dynamics_score(arma, truth, big).norm() / 10000.0 < 0.25);
}

TEST_CASE("m_step_dynamics ascends and solves the location-only case") {
  const ModelSpec spec = ModelSpec::symmetric(1, 0, 0, 0);
  ParamVector p = ParamVector::zeros(spec);
  p.alpha = 0.7;
  SeriesPanel panel;
  panel.y = sample_mvlogbs(200, MvLogBsParams{0.7, Eigen::VectorXd::Constant(1, 0.8),
                                              Eigen::MatrixXd::Identity(1, 1)},
                           5);
  panel.x.resize(200, 0);
  const DynamicsStep step = m_step_dynamics(spec, p, panel, EmSettings{});
  CHECK(conditional_loglik(spec, step.params, panel) >= conditional_loglik(spec, p, panel));

  // golden-section search on the same objective
  auto ll = [&](double eta) {
    ParamVector q = p;
    q.components[0].eta = eta;
    return conditional_loglik(spec, q, panel);
  };
  double lo = -2.0, hi = 3.0;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-10) {
    const double a = hi - ratio * (hi - lo);
    const double b = lo + ratio * (hi - lo);
    if (ll(a) > ll(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  CHECK(step.params.components[0].eta == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));

  const ModelSpec arma = ModelSpec::symmetric(2, 1, 1, 1);
  const ParamVector truth = arma11_truth();
  const SeriesPanel sim = testing::simulate(arma, truth, 200, 6);
  const DynamicsStep at_truth = m_step_dynamics(arma, truth, sim, EmSettings{});
  CHECK(q_function(arma, at_truth.params, sim) >= q_function(arma, truth, sim) - 1e-10);
}

TEST_CASE("initialize") {
  SUBCASE("white noise") {
    const ModelSpec spec = ModelSpec::symmetric(2, 0, 1, 1);
    MvLogBsParams law{0.4, Eigen::Vector2d(1.0, -0.5), testing::equicorrelation(2, 0.3)};
    SeriesPanel panel;
    panel.y = sample_mvlogbs(3000, law, 8);
    panel.x.resize(3000, 0);
    const ParamVector init = initialize(spec, panel);
    for (std::size_t j = 0; j < 2; ++j) {
      // ARMA(1,1) on white noise is only identified up to phi = -theta
      CHECK(std::abs(init.components[j].phi[0] + init.components[j].theta[0]) < 0.1);
      const double mean = panel.y.col(static_cast<Eigen::Index>(j)).mean();
      // the AR intercept absorbs (1 - phi) of the mean
      CHECK(std::abs(init.components[j].eta / (1.0 - init.components[j].phi[0]) - mean) <= 0.03);
    }
    CHECK(init.psi()(0, 0) == 1.0);
    CHECK(init.psi()(1, 1) == 1.0);
    CHECK(std::abs(init.alpha - 0.4) <= 0.02);

    // with one lag polynomial the coefficient is identified and near zero
    for (const ModelSpec& one : {ModelSpec::symmetric(2, 0, 1, 0), ModelSpec::symmetric(2, 0, 0, 1)}) {
      const ParamVector p = initialize(one, panel);
      for (std::size_t j = 0; j < 2; ++j) {
        const double coef =
            one.p[j] > 0 ? p.components[j].phi[0] : p.components[j].theta[0];
        CHECK(std::abs(coef) < 0.1);
        if (one.p[j] == 0) {
          CHECK(std::abs(p.components[j].eta - panel.y.col(static_cast<Eigen::Index>(j)).mean()) <= 0.03);
        }
      }
    }
  }
  SUBCASE("shape from a five-point sample") {
    const ModelSpec spec = ModelSpec::symmetric(1, 0, 0, 0);
    SeriesPanel panel;
    panel.y = (Eigen::VectorXd(5) << 0.2, -0.1, 0.4, 0.0, 0.5).finished();
    panel.x.resize(5, 0);
    const double mean = panel.y.mean();
    double s2 = 0.0;
    for (Eigen::Index t = 0; t < 5; ++t) {
      s2 += std::pow(std::sinh(0.5 * (panel.y(t, 0) - mean)), 2);
    }
    const ParamVector init = initialize(spec, panel);
    CHECK(init.components[0].eta == doctest::Approx(mean).epsilon(1e-8));
    CHECK(init.alpha == doctest::Approx(2.0 * std::sqrt(s2 / 5.0)).epsilon(1e-8));
  }
}

TEST_CASE("em_fit ascent, convergence and fixed point") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  const ParamVector truth = arma11_truth();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SeriesPanel panel = testing::simulate(spec, truth, 300, seed);
    const FitResult fit = em_fit(spec, panel);
    CHECK(fit.converged);
    for (std::size_t i = 1; i < fit.em_trace.size(); ++i) {
      CHECK(fit.em_trace[i] >= fit.em_trace[i - 1] - 1e-8);
    }
    CHECK(fit.loglik == doctest::Approx(conditional_loglik(spec, fit.estimates, panel)));
    CHECK(fit.bic == doctest::Approx(-2.0 * fit.loglik + 10.0 * std::log(299.0)));
    // (alpha, psi) are already optimal for the final dynamics
    const ShapeCorr again = m_step_shape_corr(compute_internals(spec, fit.estimates, panel));
    CHECK(again.alpha == doctest::Approx(fit.estimates.alpha).epsilon(1e-6));
    CHECK(again.psi(0, 1) == doctest::Approx(fit.estimates.psi_lower[0]).epsilon(1e-6));
  }
}

TEST_CASE("em_fit reduces to a univariate fit when d = 1") {
  const ModelSpec spec = ModelSpec::symmetric(1, 1, 1, 1);
  ParamVector truth = ParamVector::zeros(spec);
  truth.alpha = 0.5;
  truth.components[0] = {{0.5}, {0.3}, {0.3}, 1.2};
  const SeriesPanel panel = testing::simulate(spec, truth, 300, 31);
  EmSettings settings;
  settings.loglik_tol = 1e-10;
  settings.bfgs_grad_tol = 1e-10;
  const FitResult fit = em_fit(spec, panel, settings);

  // Maximize the univariate log-likelihood directly, alpha profiled out.
  auto negll = [&](const Eigen::VectorXd& g) {
    ParamVector p = truth;
    p.set_dynamics(g);
    const LocationState s = compute_locations(spec, p, panel);
    const Eigen::ArrayXd sh = (0.5 * s.u.col(0).tail(299)).array().sinh();
    p.alpha = 2.0 * std::sqrt(sh.square().mean());
    return -conditional_loglik(spec, p, panel);
  };
  const Eigen::VectorXd g = testing::nelder_mead_restarts(negll, truth.dynamics(), 4);
  CHECK(fit.loglik == doctest::Approx(-negll(g)).epsilon(1e-8));
}

TEST_CASE("estimated alpha and psi are scale free") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  const ParamVector truth = arma11_truth();
  const SeriesPanel panel = testing::simulate(spec, truth, 300, 17);
  SeriesPanel shifted = panel;
  shifted.y.array() += std::log(7.5);
  EmSettings settings;
  settings.compute_std_errors = false;
  settings.loglik_tol = 1e-10;
  const FitResult a = em_fit(spec, panel, settings);
  const FitResult b = em_fit(spec, shifted, settings);
  CHECK(b.estimates.alpha == doctest::Approx(a.estimates.alpha).epsilon(1e-6));
  CHECK(b.estimates.psi_lower[0] == doctest::Approx(a.estimates.psi_lower[0]).epsilon(1e-6));
}

TEST_CASE("std_errors_from_hessian") {
  // Gaussian mean model with n = 50, sigma = 2: Hessian -n / sigma^2.
  const Eigen::MatrixXd h = Eigen::MatrixXd::Constant(1, 1, -50.0 / 4.0);
  const HessianStdErrors se = std_errors_from_hessian(h);
  CHECK(se.information_pd);
  CHECK(se.se[0] == doctest::Approx(2.0 / std::sqrt(50.0)));

  Eigen::Matrix2d indefinite;
  indefinite << -4.0, 0.0, 0.0, 1.0;
  const HessianStdErrors partial = std_errors_from_hessian(indefinite);
  CHECK_FALSE(partial.information_pd);
  CHECK(partial.available[0]);
  CHECK(partial.se[0] == doctest::Approx(0.5));
  CHECK_FALSE(partial.available[1]);
  CHECK(std::isnan(partial.se[1]));
}

TEST_CASE("observed information standard errors track the sampling spread of alpha") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  McScenario scenario = bivariate_scenario(0.5, 2000, 200, 404);
  const FitResult fit = em_fit(spec, generate_panel(scenario, 0));
  CHECK(fit.information_pd);
  const StdErrorResult info = observed_info_std_errors(spec, fit.estimates,
                                                       generate_panel(scenario, 0), EmSettings{});
  CHECK((info.hessian - info.hessian.transpose()).cwiseAbs().maxCoeff() <=
        1e-6 * info.hessian.cwiseAbs().maxCoeff());

  const McReport report = run_study(scenario);
  REQUIRE(report.n_converged > 150);
  const double mc_sd = std::sqrt(report.mse[0] - report.bias[0] * report.bias[0]);
  CHECK(std::abs(fit.std_errors.alpha - mc_sd) <= 0.30 * mc_sd);
}

TEST_CASE("bic") {
  CHECK(ModelSpec::symmetric(3, 5, 0, 1).free_parameters() == 25);
  CHECK(std::abs(bic_value(85.28, 25, 74) - (-63.0)) < 0.05);
  // A useless extra parameter raises BIC.
  CHECK(bic_value(85.28, 26, 74) > bic_value(85.28, 25, 74));
}

TEST_CASE("select_by_bic ranks candidates on a shared sample") {
  const ModelSpec truth_spec = ModelSpec::symmetric(2, 1, 0, 1);
  ParamVector truth = ParamVector::zeros(truth_spec);
  truth.alpha = 0.5;
  truth.components[0] = {{}, {0.6}, {0.3}, 1.0};
  truth.components[1] = {{}, {0.6}, {0.3}, 1.0};
  truth.psi_lower = {0.4};
  const SeriesPanel panel = testing::simulate(truth_spec, truth, 300, 2);
  std::vector<ModelSpec> grid;
  for (std::size_t p : {0, 1, 2}) {
    for (std::size_t q : {0, 1}) grid.push_back(ModelSpec::symmetric(2, 1, p, q));
  }
  const auto ranked = select_by_bic(panel, grid);
  REQUIRE(ranked.size() == grid.size());
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].bic <= ranked[i].bic);
  for (const auto& r : ranked) {
    REQUIRE(r.fit.has_value());
    CHECK(r.fit->effective_n == 298);
  }
  CHECK(ranked.front().spec.q[0] == 1);
  CHECK(select_by_bic(panel, {truth_spec}).size() == 1);
}

TEST_CASE("em_fit failure modes") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  SeriesPanel panel = testing::simulate(spec, arma11_truth(), 100, 3);
  EmSettings one;
  one.max_em_iters = 1;
  one.loglik_tol = 1e-300;
  const FitResult fit = em_fit(spec, panel, one);
  CHECK_FALSE(fit.converged);
  CHECK_FALSE(fit.warnings.empty());

  SeriesPanel flat = panel;
  flat.y.col(1).setConstant(2.0);
  CHECK_THROWS_AS(em_fit(spec, flat), DegenerateData);

  SeriesPanel constant_x = panel;
  constant_x.x.setOnes();
  EmSettings quick;
  quick.compute_std_errors = false;
  const FitResult warned = em_fit(spec, constant_x, quick);
  CHECK(std::any_of(warned.warnings.begin(), warned.warnings.end(),
                    [](const std::string& w) { return w.find("constant") != std::string::npos; }));
}

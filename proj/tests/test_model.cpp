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
#include <random>

#include <Eigen/Eigenvalues>

#include "mbsarma/distributions.hpp"
#include "mbsarma/errors.hpp"
#include "mbsarma/model.hpp"
#include "support/oracles.hpp"

using namespace mbsarma;
using mbsarma::testing::Float50;

namespace {

SeriesPanel univariate(std::initializer_list<double> values) {
  SeriesPanel panel;
  panel.y.resize(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) panel.y(i++, 0) = v;
  panel.x.resize(panel.y.rows(), 0);
  return panel;
}

}  // namespace

TEST_CASE("ModelSpec bookkeeping") {
  const ModelSpec spec = ModelSpec::symmetric(3, 5, 0, 1);
  CHECK(spec.max_order() == 1);
  CHECK(spec.free_parameters() == 25);
  CHECK(spec.dynamics_size() == 21);
  CHECK(spec.label() == "MBSARMA(0,0,0|1,1,1)");
  ModelSpec wide = ModelSpec::symmetric(2, 0, 1, 1);
  wide.condition_on = 4;
  CHECK(wide.start() == 4);
  ModelSpec bad = spec;
  bad.p.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ParamVector flatten round trip and names") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  std::mt19937_64 rng(5);
  const ParamVector p = testing::random_arma11_point(spec, rng);
  const Eigen::VectorXd flat = p.flatten();
  CHECK(flat.size() == static_cast<Eigen::Index>(spec.free_parameters()));
  CHECK(ParamVector::unflatten(spec, flat).flatten() == flat);
  const auto names = ParamVector::names(spec);
  CHECK(names.front() == "alpha");
  CHECK(names[1] == "phi_1_1");
  CHECK(names.back() == "rho_12");
  ParamVector q = p;
  Eigen::VectorXd g = q.dynamics();
  g[0] += 0.25;
  q.set_dynamics(g);
  CHECK(q.components[0].phi[0] == doctest::Approx(p.components[0].phi[0] + 0.25));
  const Eigen::MatrixXd psi = p.psi();
  CHECK(psi(0, 0) == 1.0);
  CHECK(psi(1, 0) == psi(0, 1));
}

TEST_CASE("compute_locations hand recursions") {
  SUBCASE("regression only") {
    const ModelSpec spec = ModelSpec::symmetric(1, 0, 0, 0);
    ParamVector p = ParamVector::zeros(spec);
    p.components[0].eta = 0.7;
    const LocationState s = compute_locations(spec, p, univariate({1.0, 2.0, 0.5}));
    CHECK(s.mu.col(0).isConstant(0.7));
  }
  SUBCASE("AR(1)") {
    const ModelSpec spec = ModelSpec::symmetric(1, 0, 1, 0);
    ParamVector p = ParamVector::zeros(spec);
    p.components[0].phi = {0.5};
    p.components[0].eta = 1.0;
    const LocationState s = compute_locations(spec, p, univariate({2.0, 2.0, 2.0}));
    CHECK(s.valid_from == 1);
    CHECK(std::isnan(s.mu(0, 0)));
    CHECK(s.mu(1, 0) == 2.0);
    CHECK(s.u(1, 0) == 0.0);
    CHECK(s.mu(2, 0) == 2.0);
  }
  SUBCASE("MA(1) start-up") {
    const ModelSpec spec = ModelSpec::symmetric(1, 0, 0, 1);
    ParamVector p = ParamVector::zeros(spec);
    p.components[0].theta = {0.3};
    const LocationState s = compute_locations(spec, p, univariate({1.0, 0.5}));
    CHECK(s.u(0, 0) == 0.0);
    CHECK(s.mu(1, 0) == 0.0);
    CHECK(s.u(1, 0) == 0.5);
  }
  SUBCASE("covariates enter de-trended") {
    ModelSpec spec = ModelSpec::symmetric(1, 1, 1, 1);
    ParamVector p = ParamVector::zeros(spec);
    p.components[0] = {{0.4}, {0.2}, {2.0}, 0.1};
    SeriesPanel panel = univariate({1.0, 3.0, 0.0});
    panel.x = Eigen::Vector3d(1.0, 0.0, 1.0);
    const LocationState s = compute_locations(spec, p, panel);
    // mu_2 = 0 * 2 + 0.1 + 0.4 * (1 - 2) + 0.2 * 0 = -0.3
    CHECK(s.mu(1, 0) == doctest::Approx(-0.3));
    // mu_3 = 2 + 0.1 + 0.4 * (3 - 0) + 0.2 * 3.3 = 3.96
    CHECK(s.mu(2, 0) == doctest::Approx(3.96));
  }
}

TEST_CASE("conditional_loglik reductions") {
  const ModelSpec spec1 = ModelSpec::symmetric(1, 0, 0, 0);
  ParamVector p1 = ParamVector::zeros(spec1);
  p1.alpha = 0.6;
  p1.components[0].eta = 0.2;
  const SeriesPanel panel1 = univariate({0.1, 0.9, -0.4, 0.3});
  double direct = 0.0;
  for (Eigen::Index t = 0; t < 4; ++t) direct += logbs_logpdf(panel1.y(t, 0), {0.6, 0.2});
  CHECK(conditional_loglik(spec1, p1, panel1) == doctest::Approx(direct).epsilon(1e-12));

  // Row order does not matter without dynamics.
  SeriesPanel permuted = panel1;
  permuted.y.col(0).reverseInPlace();
  CHECK(conditional_loglik(spec1, p1, permuted) ==
        doctest::Approx(conditional_loglik(spec1, p1, panel1)).epsilon(1e-14));

  // Identity correlation decouples the components.
  const ModelSpec spec2 = ModelSpec::symmetric(2, 1, 1, 1);
  std::mt19937_64 rng(9);
  ParamVector p2 = testing::random_arma11_point(spec2, rng);
  p2.psi_lower = {0.0};
  const SeriesPanel panel2 = testing::simulate(spec2, p2, 40, 3);
  double sum = 0.0;
  const ModelSpec single = ModelSpec::symmetric(1, 1, 1, 1);
  for (int j = 0; j < 2; ++j) {
    ParamVector pj = ParamVector::zeros(single);
    pj.alpha = p2.alpha;
    pj.components[0] = p2.components[static_cast<std::size_t>(j)];
    SeriesPanel sj;
    sj.y = panel2.y.col(j);
    sj.x = panel2.x;
    sum += conditional_loglik(single, pj, sj);
  }
  CHECK(conditional_loglik(spec2, p2, panel2) == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("conditional_loglik on a toy panel matches a 50-digit evaluation") {
  using boost::multiprecision::cosh;
  using boost::multiprecision::log;
  using boost::multiprecision::sinh;
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  ParamVector p = ParamVector::zeros(spec);
  p.alpha = 0.5;
  p.components[0] = {{0.5}, {0.1}, {0.3}, 1.2};
  p.components[1] = {{0.7}, {0.1}, {0.3}, 1.2};
  p.psi_lower = {0.5};
  SeriesPanel panel;
  panel.y.resize(5, 2);
  panel.y << 2.1, 3.9, 2.6, 4.2, 2.2, 4.0, 2.9, 4.5, 2.4, 4.1;
  panel.x.resize(5, 1);
  panel.x << 1, 0, 1, 1, 0;

  const Float50 alpha(0.5), rho(0.5);
  const Float50 pi = boost::math::constants::pi<Float50>();
  Float50 total = 0;
  Float50 u_prev[2] = {0, 0};
  for (int t = 1; t < 5; ++t) {
    Float50 a[2], logc = 0;
    for (int j = 0; j < 2; ++j) {
      const auto& c = p.components[static_cast<std::size_t>(j)];
      const Float50 beta(c.beta[0]);
      const Float50 mu = Float50(c.eta) + Float50(panel.x(t, 0)) * beta +
                         Float50(c.phi[0]) * (Float50(panel.y(t - 1, j)) -
                                              Float50(panel.x(t - 1, 0)) * beta) +
                         Float50(c.theta[0]) * u_prev[j];
      const Float50 u = Float50(panel.y(t, j)) - mu;
      a[j] = 2 / alpha * sinh(u / 2);
      logc += log(2 / alpha * cosh(u / 2));
      u_prev[j] = u;
    }
    const Float50 det = 1 - rho * rho;
    total += logc - log(2 * pi) - 2 * log(Float50(2)) - log(det) / 2 -
             (a[0] * a[0] - 2 * rho * a[0] * a[1] + a[1] * a[1]) / (2 * det);
  }
  CHECK(conditional_loglik(spec, p, panel) ==
        doctest::Approx(static_cast<double>(total)).epsilon(1e-12));
}

TEST_CASE("conditional_loglik rejects invalid parameters") {
  const ModelSpec spec = ModelSpec::symmetric(2, 0, 0, 0);
  ParamVector p = ParamVector::zeros(spec);
  p.psi_lower = {1.0};
  SeriesPanel panel;
  panel.y = Eigen::MatrixXd::Random(6, 2);
  panel.x.resize(6, 0);
  CHECK_THROWS_AS(conditional_loglik(spec, p, panel), NotPositiveDefinite);
  p.psi_lower = {0.0};
  p.alpha = -1.0;
  CHECK_THROWS_AS(conditional_loglik(spec, p, panel), std::domain_error);
  panel.y(2, 1) = std::nan("");
  p.alpha = 1.0;
  CHECK_THROWS_AS(conditional_loglik(spec, p, panel), std::invalid_argument);
}

TEST_CASE("compute_locations is reproducible") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 1);
  std::mt19937_64 rng(2);
  const ParamVector p = testing::random_arma11_point(spec, rng);
  const SeriesPanel panel = testing::simulate(spec, p, 60, 8);
  const LocationState a = compute_locations(spec, p, panel);
  const LocationState b = compute_locations(spec, p, panel);
  CHECK(a.u == b.u);
}

TEST_CASE("check_roots") {
  CHECK(min_root_modulus({0.5}, -1.0) == doctest::Approx(2.0).epsilon(1e-14));
  for (double a : {-0.9, -0.3, 0.2, 0.8, 1.5}) {
    CHECK(min_root_modulus({a}, -1.0) == doctest::Approx(1.0 / std::abs(a)).epsilon(1e-12));
  }
  // 1 - 0.5z - 0.3z^2 has roots (-0.5 +- sqrt(0.25 + 1.2)) / 0.6.
  const double r1 = (-0.5 + std::sqrt(1.45)) / 0.6;
  const double r2 = std::abs((-0.5 - std::sqrt(1.45)) / 0.6);
  CHECK(min_root_modulus({0.5, 0.3}, -1.0) == doctest::Approx(std::min(r1, r2)).epsilon(1e-12));

  const ModelSpec spec = ModelSpec::symmetric(2, 0, 1, 1);
  ParamVector p = ParamVector::zeros(spec);
  p.components[0].phi = {0.5};
  p.components[0].theta = {0.4};
  p.components[1].phi = {1.0};
  p.components[1].theta = {-1.2};
  const auto rep = check_roots(spec, p);
  CHECK(rep[0].ar_stationary);
  CHECK(rep[0].ma_invertible);
  CHECK(rep[0].min_root_modulus == doctest::Approx(2.0));
  CHECK_FALSE(rep[1].ar_stationary);
  CHECK_FALSE(rep[1].ma_invertible);
}

TEST_CASE("unconditional_mean") {
  const ModelSpec spec = ModelSpec::symmetric(2, 1, 1, 0);
  ParamVector p = ParamVector::zeros(spec);
  p.components[0] = {{0.5}, {}, {0.3}, 1.2};
  p.components[1] = {{0.99}, {}, {0.0}, 0.01};
  const UnconditionalMean m = unconditional_mean(spec, p, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(m.mean[0] == doctest::Approx(0.3 + 2.4));
  CHECK_FALSE(m.near_unit_root[0]);
  CHECK(std::isfinite(m.mean[1]));
  CHECK(m.near_unit_root[1]);

  const ModelSpec flat = ModelSpec::symmetric(1, 0, 1, 0);
  ParamVector unit = ParamVector::zeros(flat);
  unit.components[0].phi = {1.0};
  CHECK_THROWS(unconditional_mean(flat, unit, Eigen::VectorXd(0)));
}

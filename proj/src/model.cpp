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

#include "mbsarma/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "mbsarma/detail/recursion.hpp"
#include "mbsarma/distributions.hpp"

namespace mbsarma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string idx(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

ModelSpec ModelSpec::symmetric(std::size_t d, std::size_t k, std::size_t p,
                               std::size_t q) {
  ModelSpec spec;
  spec.d = d;
  spec.k = k;
  spec.p.assign(d, p);
  spec.q.assign(d, q);
  return spec;
}

std::size_t ModelSpec::max_order() const {
  std::size_t m = 0;
  for (std::size_t j = 0; j < p.size(); ++j) m = std::max(m, p[j]);
  for (std::size_t j = 0; j < q.size(); ++j) m = std::max(m, q[j]);
  return m;
}

std::size_t ModelSpec::component_size(std::size_t j) const {
  return p.at(j) + q.at(j) + k + 1;
}

std::size_t ModelSpec::dynamics_size() const {
  std::size_t total = 0;
  for (std::size_t j = 0; j < d; ++j) total += component_size(j);
  return total;
}

std::size_t ModelSpec::free_parameters() const {
  return 1 + dynamics_size() + correlation_size();
}

void ModelSpec::validate() const {
  if (d == 0) throw std::invalid_argument("model needs at least one component");
  if (p.size() != d || q.size() != d) {
    throw std::invalid_argument("AR and MA order vectors must have length d = " +
                                std::to_string(d));
  }
}

std::string ModelSpec::label() const {
  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s;
  };
  return "MBSARMA(" + join(p) + "|" + join(q) + ")";
}

ParamVector ParamVector::zeros(const ModelSpec& spec) {
  spec.validate();
  ParamVector params;
  params.alpha = 1.0;
  params.components.resize(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) {
    params.components[j].phi.assign(spec.p[j], 0.0);
    params.components[j].theta.assign(spec.q[j], 0.0);
    params.components[j].beta.assign(spec.k, 0.0);
  }
  params.psi_lower.assign(spec.correlation_size(), 0.0);
  return params;
}

Eigen::MatrixXd ParamVector::psi() const {
  const auto d = static_cast<Eigen::Index>(components.size());
  Eigen::MatrixXd psi = Eigen::MatrixXd::Identity(d, d);
  std::size_t pos = 0;
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = c + 1; r < d; ++r) {
      psi(r, c) = psi(c, r) = psi_lower.at(pos++);
    }
  }
  return psi;
}

void ParamVector::set_psi(const Eigen::MatrixXd& psi) {
  const Eigen::Index d = psi.rows();
  psi_lower.clear();
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = c + 1; r < d; ++r) psi_lower.push_back(psi(r, c));
  }
}

Eigen::VectorXd ParamVector::dynamics() const {
  std::vector<double> flat;
  for (const auto& c : components) {
    flat.insert(flat.end(), c.phi.begin(), c.phi.end());
    flat.insert(flat.end(), c.theta.begin(), c.theta.end());
    flat.insert(flat.end(), c.beta.begin(), c.beta.end());
    flat.push_back(c.eta);
  }
  return Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

void ParamVector::set_dynamics(const Eigen::VectorXd& gamma0) {
  Eigen::Index pos = 0;
  for (auto& c : components) {
    for (auto& v : c.phi) v = gamma0[pos++];
    for (auto& v : c.theta) v = gamma0[pos++];
    for (auto& v : c.beta) v = gamma0[pos++];
    c.eta = gamma0[pos++];
  }
  if (pos != gamma0.size()) {
    throw std::invalid_argument("dynamics vector has the wrong length");
  }
}

Eigen::VectorXd ParamVector::flatten() const {
  const Eigen::VectorXd dyn = dynamics();
  Eigen::VectorXd flat(1 + dyn.size() + static_cast<Eigen::Index>(psi_lower.size()));
  flat[0] = alpha;
  flat.segment(1, dyn.size()) = dyn;
  for (std::size_t i = 0; i < psi_lower.size(); ++i) {
    flat[1 + dyn.size() + static_cast<Eigen::Index>(i)] = psi_lower[i];
  }
  return flat;
}

ParamVector ParamVector::unflatten(const ModelSpec& spec, const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != spec.free_parameters()) {
    throw std::invalid_argument("flat parameter vector has length " +
                                std::to_string(flat.size()) + ", expected " +
                                std::to_string(spec.free_parameters()));
  }
  ParamVector params = zeros(spec);
  params.alpha = flat[0];
  const auto nd = static_cast<Eigen::Index>(spec.dynamics_size());
  params.set_dynamics(flat.segment(1, nd));
  for (std::size_t i = 0; i < params.psi_lower.size(); ++i) {
    params.psi_lower[i] = flat[1 + nd + static_cast<Eigen::Index>(i)];
  }
  return params;
}

std::vector<std::string> ParamVector::names(const ModelSpec& spec) {
  std::vector<std::string> out{"alpha"};
  for (std::size_t j = 0; j < spec.d; ++j) {
    for (std::size_t i = 0; i < spec.p[j]; ++i) out.push_back("phi_" + idx(i) + "_" + idx(j));
    for (std::size_t l = 0; l < spec.q[j]; ++l) out.push_back("theta_" + idx(l) + "_" + idx(j));
    for (std::size_t l = 0; l < spec.k; ++l) out.push_back("beta_" + idx(l) + "_" + idx(j));
    out.push_back("eta_" + idx(j));
  }
  for (std::size_t c = 0; c < spec.d; ++c) {
    for (std::size_t r = c + 1; r < spec.d; ++r) out.push_back("rho_" + idx(c) + idx(r));
  }
  return out;
}

void ParamVector::check_shape(const ModelSpec& spec) const {
  spec.validate();
  if (components.size() != spec.d) {
    throw std::invalid_argument("parameter vector has " + std::to_string(components.size()) +
                                " components, model has " + std::to_string(spec.d));
  }
  for (std::size_t j = 0; j < spec.d; ++j) {
    const auto& c = components[j];
    if (c.phi.size() != spec.p[j] || c.theta.size() != spec.q[j] ||
        c.beta.size() != spec.k) {
      throw std::invalid_argument("component " + idx(j) +
                                  " parameters do not match the model orders");
    }
  }
  if (psi_lower.size() != spec.correlation_size()) {
    throw std::invalid_argument("correlation block has the wrong length");
  }
}

SeriesPanel SeriesPanel::head(std::size_t rows) const {
  const auto r = static_cast<Eigen::Index>(rows);
  return SeriesPanel{y.topRows(r), x.topRows(r)};
}

void SeriesPanel::check(const ModelSpec& spec) const {
  if (d() != spec.d) {
    throw std::invalid_argument("panel has " + std::to_string(d()) +
                                " response columns, model has d = " + std::to_string(spec.d));
  }
  if (k() != spec.k || static_cast<std::size_t>(x.rows()) != n()) {
    throw std::invalid_argument("covariate matrix must be n x k with k = " +
                                std::to_string(spec.k));
  }
  if (n() <= spec.start()) {
    throw std::invalid_argument("series length n = " + std::to_string(n()) +
                                " must exceed the conditioning order " +
                                std::to_string(spec.start()));
  }
  if (!y.allFinite() || !x.allFinite()) {
    throw std::invalid_argument("panel contains missing or non-finite values");
  }
}

namespace detail {

void component_recursion(const ModelSpec& spec, std::size_t j,
                         const ComponentParams& c, const SeriesPanel& panel,
                         std::size_t start, Eigen::Ref<Eigen::VectorXd> mu,
                         Eigen::Ref<Eigen::VectorXd> u, Eigen::MatrixXd* jac) {
  const auto n = static_cast<Eigen::Index>(panel.n());
  const auto p = static_cast<Eigen::Index>(c.phi.size());
  const auto q = static_cast<Eigen::Index>(c.theta.size());
  const auto k = static_cast<Eigen::Index>(spec.k);
  const auto s0 = static_cast<Eigen::Index>(start);
  const auto col = static_cast<Eigen::Index>(j);
  const Eigen::Map<const Eigen::VectorXd> beta(c.beta.data(), k);

  // de-trended series rho_t = y_t - x_t' beta
  Eigen::VectorXd detrended = panel.y.col(col);
  if (k > 0) detrended.noalias() -= panel.x * beta;

  mu.head(s0).setConstant(kNaN);
  u.head(s0).setZero();
  if (jac != nullptr) {
    jac->setZero(n, p + q + k + 1);
  }
  for (Eigen::Index t = s0; t < n; ++t) {
    const double regression = panel.y(t, col) - detrended[t];  // x_t' beta
    double m = c.eta + regression;
    for (Eigen::Index i = 0; i < p; ++i) m += c.phi[i] * detrended[t - i - 1];
    for (Eigen::Index l = 0; l < q; ++l) m += c.theta[l] * u[t - l - 1];
    mu[t] = m;
    u[t] = panel.y(t, col) - m;

    if (jac != nullptr) {
      auto row = jac->row(t);
      for (Eigen::Index i = 0; i < p; ++i) row[i] = detrended[t - i - 1];
      for (Eigen::Index l = 0; l < q; ++l) row[p + l] = u[t - l - 1];
      for (Eigen::Index b = 0; b < k; ++b) {
        double v = panel.x(t, b);
        for (Eigen::Index i = 0; i < p; ++i) v -= c.phi[i] * panel.x(t - i - 1, b);
        row[p + q + b] = v;
      }
      row[p + q + k] = 1.0;
      for (Eigen::Index l = 0; l < q; ++l) {
        if (t - l - 1 >= s0) row -= c.theta[l] * jac->row(t - l - 1);
      }
    }
  }
}

}  // namespace detail

LocationState compute_locations(const ModelSpec& spec, const ParamVector& params,
                                const SeriesPanel& panel) {
  params.check_shape(spec);
  panel.check(spec);
  LocationState state;
  state.valid_from = spec.start();
  state.mu.resize(panel.y.rows(), panel.y.cols());
  state.u.resize(panel.y.rows(), panel.y.cols());
  for (std::size_t j = 0; j < spec.d; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    detail::component_recursion(spec, j, params.components[j], panel, state.valid_from,
                                state.mu.col(col), state.u.col(col), nullptr);
  }
  return state;
}

double conditional_loglik(const ModelSpec& spec, const ParamVector& params,
                          const SeriesPanel& panel) {
  if (!(params.alpha > 0.0)) throw std::domain_error("alpha must be positive");
  const LocationState state = compute_locations(spec, params, panel);
  const CholeskyFactor factor(params.psi());
  const auto d = static_cast<Eigen::Index>(spec.d);
  const auto n = static_cast<Eigen::Index>(panel.n());
  const auto s0 = static_cast<Eigen::Index>(state.valid_from);
  const double log_two_over_alpha = std::log(2.0 / params.alpha);

  double sum_log_c = 0.0;
  double quad = 0.0;
  Eigen::VectorXd a(d);
  for (Eigen::Index t = s0; t < n; ++t) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = 0.5 * state.u(t, j);
      a[j] = 2.0 / params.alpha * std::sinh(h);
      sum_log_c += log_two_over_alpha + log_cosh(h);
    }
    quad += factor.quad_form(a);
  }
  const auto count = static_cast<double>(n - s0);
  const auto dd = static_cast<double>(d);
  const double value =
      sum_log_c -
      count * (0.5 * dd * std::log(2.0 * std::numbers::pi) + dd * std::numbers::ln2 +
               0.5 * factor.log_det()) -
      0.5 * quad;
  if (std::isnan(value)) return -std::numeric_limits<double>::infinity();
  return value;
}

double min_root_modulus(const std::vector<double>& coefs, double sign) {
  std::size_t r = coefs.size();
  while (r > 0 && coefs[r - 1] == 0.0) --r;
  if (r == 0) return std::numeric_limits<double>::infinity();
  // Reciprocal roots are the eigenvalues of the companion matrix of
  // z^r + sign * (c_1 z^{r-1} + ... + c_r).
  const auto rr = static_cast<Eigen::Index>(r);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(rr, rr);
  for (Eigen::Index i = 0; i < rr; ++i) companion(0, i) = -sign * coefs[i];
  for (Eigen::Index i = 1; i < rr; ++i) companion(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const double largest = solver.eigenvalues().cwiseAbs().maxCoeff();
  return 1.0 / largest;
}

std::vector<RootReport> check_roots(const ModelSpec& spec, const ParamVector& params) {
  params.check_shape(spec);
  constexpr double kUnitCircle = 1.0 + 1e-10;
  std::vector<RootReport> reports(spec.d);
  for (std::size_t j = 0; j < spec.d; ++j) {
    auto& rep = reports[j];
    rep.min_ar_root_modulus = min_root_modulus(params.components[j].phi, -1.0);
    rep.min_ma_root_modulus = min_root_modulus(params.components[j].theta, +1.0);
    rep.min_root_modulus = std::min(rep.min_ar_root_modulus, rep.min_ma_root_modulus);
    rep.ar_stationary = rep.min_ar_root_modulus > kUnitCircle;
    rep.ma_invertible = rep.min_ma_root_modulus > kUnitCircle;
  }
  return reports;
}

UnconditionalMean unconditional_mean(const ModelSpec& spec, const ParamVector& params,
                                     const Eigen::VectorXd& x_t) {
  params.check_shape(spec);
  if (static_cast<std::size_t>(x_t.size()) != spec.k) {
    throw std::invalid_argument("covariate vector must have length k");
  }
  UnconditionalMean out;
  out.mean.resize(static_cast<Eigen::Index>(spec.d));
  out.near_unit_root.assign(spec.d, false);
  for (std::size_t j = 0; j < spec.d; ++j) {
    const auto& c = params.components[j];
    double ar_sum = 0.0;
    for (double v : c.phi) ar_sum += v;
    const double denom = 1.0 - ar_sum;
    if (std::abs(denom) < 1e-12) {
      throw std::domain_error("component " + idx(j) +
                              " has a unit AR root; the marginal mean does not exist");
    }
    double reg = 0.0;
    for (std::size_t l = 0; l < spec.k; ++l) reg += x_t[static_cast<Eigen::Index>(l)] * c.beta[l];
    out.mean[static_cast<Eigen::Index>(j)] = reg + c.eta / denom;
    out.near_unit_root[j] = min_root_modulus(c.phi, -1.0) < kNearUnitRootModulus;
  }
  return out;
}

}  // namespace mbsarma

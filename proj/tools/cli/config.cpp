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

#include "cli/config.hpp"

#include <fstream>

#include "cli/csv.hpp"

namespace mbsarma::cli {

namespace {

using nlohmann::json;

std::vector<std::size_t> orders(const json& value, std::size_t d, const char* what) {
  if (value.is_number_unsigned()) return std::vector<std::size_t>(d, value.get<std::size_t>());
  if (value.is_array()) {
    auto out = value.get<std::vector<std::size_t>>();
    if (out.size() != d) {
      throw ParseError(std::string("model.") + what + " needs one order per response");
    }
    return out;
  }
  throw ParseError(std::string("model.") + what + " must be a nonnegative integer or a list");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

ParamVector parse_truth(const ModelSpec& spec, const json& doc) {
  ParamVector params = ParamVector::zeros(spec);
  params.alpha = doc.at("alpha").get<double>();
  const auto& comps = doc.at("components");
  if (comps.size() != spec.d) throw ParseError("truth.components needs one entry per response");
  for (std::size_t j = 0; j < spec.d; ++j) {
    const auto& c = comps.at(j);
    auto& out = params.components[j];
    read(c, "phi", out.phi);
    read(c, "theta", out.theta);
    read(c, "beta", out.beta);
    read(c, "eta", out.eta);
  }
  read(doc, "psi_lower", params.psi_lower);
  try {
    params.check_shape(spec);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("truth: ") + e.what());
  }
  return params;
}

json truth_to_json(const ParamVector& params) {
  json doc;
  doc["alpha"] = params.alpha;
  doc["components"] = json::array();
  for (const auto& c : params.components) {
    doc["components"].push_back(
        {{"phi", c.phi}, {"theta", c.theta}, {"beta", c.beta}, {"eta", c.eta}});
  }
  doc["psi_lower"] = params.psi_lower;
  return doc;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  try {
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      read(d, "path", cfg.data.path);
      read(d, "time_column", cfg.data.time_column);
      read(d, "responses", cfg.data.responses);
      read(d, "covariates", cfg.data.covariates);
      read(d, "log_transform", cfg.data.log_transform);
      read(d, "harmonic_period", cfg.data.harmonic_period);
    }
    const std::size_t d = cfg.data.responses.size();
    std::size_t k = cfg.data.covariates.size() + (cfg.data.harmonic_period > 0 ? 5 : 0);
    if (doc.contains("model")) {
      const auto& m = doc.at("model");
      std::size_t dim = d;
      read(m, "d", dim);
      read(m, "k", k);
      cfg.spec.d = dim;
      cfg.spec.k = k;
      cfg.spec.p = orders(m.value("p", json(0u)), dim, "p");
      cfg.spec.q = orders(m.value("q", json(0u)), dim, "q");
      read(m, "condition_on", cfg.spec.condition_on);
      cfg.has_spec = true;
    } else {
      cfg.spec.d = d;
      cfg.spec.k = k;
    }
    if (doc.contains("select")) {
      read(doc.at("select"), "p_grid", cfg.p_grid);
      read(doc.at("select"), "q_grid", cfg.q_grid);
    }
    if (doc.contains("em")) {
      const auto& e = doc.at("em");
      read(e, "loglik_tol", cfg.em.loglik_tol);
      read(e, "max_em_iters", cfg.em.max_em_iters);
      read(e, "bfgs_grad_tol", cfg.em.bfgs_grad_tol);
      read(e, "bfgs_max_iters", cfg.em.bfgs_max_iters);
      read(e, "hessian_step", cfg.em.hessian_step);
      read(e, "compute_std_errors", cfg.em.compute_std_errors);
      const std::string update = e.value("shape_corr_update", std::string("exact"));
      if (update == "exact") {
        cfg.em.shape_corr_update = ShapeCorrUpdate::kExact;
      } else if (update == "closed_form") {
        cfg.em.shape_corr_update = ShapeCorrUpdate::kClosedForm;
      } else {
        throw ParseError("em.shape_corr_update must be 'exact' or 'closed_form'");
      }
    }
    read(doc, "test_len", cfg.test_len);
    read(doc, "horizon", cfg.horizon);
    const std::string naive = doc.value("naive_mode", std::string("rolling"));
    if (naive == "rolling") {
      cfg.naive_mode = NaiveMode::kRolling;
    } else if (naive == "fixed_origin") {
      cfg.naive_mode = NaiveMode::kFixedOrigin;
    } else {
      throw ParseError("naive_mode must be 'rolling' or 'fixed_origin'");
    }
    if (doc.contains("diagnose")) {
      const auto& g = doc.at("diagnose");
      read(g, "n_sim", cfg.diagnose.n_sim);
      read(g, "level", cfg.diagnose.level);
      read(g, "max_lag", cfg.diagnose.max_lag);
    }
    if (doc.contains("simulate")) {
      const auto& s = doc.at("simulate");
      auto& sim = cfg.simulate;
      read(s, "n", sim.n);
      read(s, "covariates", sim.covariates);
      read(s, "period", sim.period);
      read(s, "covariate_p", sim.covariate_p);
      read(s, "response_names", sim.response_names);
      read(s, "output", sim.output);
      if (sim.covariates != "bernoulli" && sim.covariates != "harmonic") {
        throw ParseError("simulate.covariates must be 'bernoulli' or 'harmonic'");
      }
      if (!cfg.has_spec) throw ParseError("simulate requires a model section");
      if (sim.covariates == "harmonic" && cfg.spec.k != 5) {
        throw ParseError("harmonic covariates need model.k = 5");
      }
      sim.truth = parse_truth(cfg.spec, s.at("truth"));
    }
    if (doc.contains("mc")) {
      const auto& m = doc.at("mc");
      auto& mc = cfg.mc;
      mc.scenario = m.value("scenario", std::string("bivariate"));
      read(m, "rho", mc.rho);
      read(m, "n", mc.sizes);
      read(m, "replicates", mc.replicates);
      read(m, "freeze_covariates", mc.freeze_covariates);
      if (mc.scenario == "custom") {
        if (!cfg.has_spec) throw ParseError("custom mc scenario requires a model section");
        mc.truth = parse_truth(cfg.spec, m.at("truth"));
      } else if (mc.scenario != "bivariate" && mc.scenario != "trivariate") {
        throw ParseError("mc.scenario must be 'bivariate', 'trivariate' or 'custom'");
      }
      if (mc.sizes.empty()) throw ParseError("mc.n must list at least one sample size");
    }
    read(doc, "seed", cfg.seed);
    read(doc, "output_dir", cfg.output_dir);
    read(doc, "full_precision", cfg.full_precision);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("config '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

}  // namespace mbsarma::cli

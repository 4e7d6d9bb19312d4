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

#ifndef MBSARMA_DETAIL_RECURSION_HPP_
#define MBSARMA_DETAIL_RECURSION_HPP_

#include <cstddef>

#include <Eigen/Core>

#include "mbsarma/model.hpp"

namespace mbsarma::detail {

// Location recursion for component j, starting at row `start` with zero
// innovations before it. Fills mu (NaN before start) and u.
//
// When jac is non-null it receives d mu_tj / d gamma_0j as an n x (p+q+k+1)
// matrix in the order (phi, theta, beta, eta). The derivative includes the
// feedback through past innovations: d u_s = -d mu_s for s >= start.
void component_recursion(const ModelSpec& spec, std::size_t j,
                         const ComponentParams& c, const SeriesPanel& panel,
                         std::size_t start, Eigen::Ref<Eigen::VectorXd> mu,
                         Eigen::Ref<Eigen::VectorXd> u, Eigen::MatrixXd* jac);

}  // namespace mbsarma::detail

#endif  // MBSARMA_DETAIL_RECURSION_HPP_

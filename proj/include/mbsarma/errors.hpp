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

#ifndef MBSARMA_ERRORS_HPP_
#define MBSARMA_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mbsarma {

// Raised when a correlation or covariance matrix fails its Cholesky
// factorization, or when its smallest pivot falls below the tolerance.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when the data cannot support a fit: constant components,
// non-positive raw values under a log transform, zero residual variance.
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbsarma

#endif  // MBSARMA_ERRORS_HPP_

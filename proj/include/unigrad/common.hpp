// Copyright 2026 The UniGrad Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNIGRAD_COMMON_HPP_
#define UNIGRAD_COMMON_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace unigrad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A module-level invariant did not hold at runtime (caller bug or mis-set
/// constants). Distinct from NumericalError so the CLI can map exit codes.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// An iterative numerical routine failed to converge or a factorization broke.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& invariant) {
  if (!cond) throw ContractError(invariant);
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline double sq(double x) { return x * x; }

}  // namespace unigrad

#endif  // UNIGRAD_COMMON_HPP_

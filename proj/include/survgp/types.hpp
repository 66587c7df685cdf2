/*
 * Copyright (c) 2026 the survgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SURVGP_TYPES_HPP
#define SURVGP_TYPES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace survgp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Cholesky of a kernel matrix failed even after jitter escalation.
struct ill_conditioned_kernel : std::runtime_error {
  explicit ill_conditioned_kernel(const std::string& what) : std::runtime_error(what) {}
};

// Input data or file contents violate a documented contract.
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace survgp

#endif  // SURVGP_TYPES_HPP

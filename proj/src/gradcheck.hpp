// Copyright 2026 The SynGen Authors. All Rights Reserved.
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
// =============================================================================

#ifndef SYNGEN_GRADCHECK_HPP_
#define SYNGEN_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "optim.hpp"
#include "tensor.hpp"

namespace syngen {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t entries_checked = 0;
};

// Compares reverse-mode gradients of a scalar forward against central
// differences (f(θ+ε) − f(θ−ε)) / 2ε for every entry of every parameter.
// Relative error uses the denominator max(|analytic|, |numeric|, 1e-8).
//
// The forward must be deterministic; two bitwise-different evaluations at the
// same point raise ErrorKind::kDeterminism. Parameters are restored exactly.
GradCheckResult FiniteDiffCheck(const std::function<Tensor()>& forward,
                                const std::vector<NamedTensor>& params, double epsilon = 1e-5);

}  // namespace syngen

#endif  // SYNGEN_GRADCHECK_HPP_

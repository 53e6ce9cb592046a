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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace syngen {

namespace {

double Evaluate(const std::function<Tensor()>& forward) {
  NoGradGuard guard;
  return forward().item();
}

}  // namespace

GradCheckResult FiniteDiffCheck(const std::function<Tensor()>& forward,
                                const std::vector<NamedTensor>& params, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) {
    throw Error(ErrorKind::kPrecondition, "finite-difference epsilon must lie in [1e-7, 1e-3]");
  }
  const double first = Evaluate(forward);
  const double second = Evaluate(forward);
  if (first != second) {
    throw Error(ErrorKind::kDeterminism, "forward returned different values on identical calls");
  }

  std::vector<NamedTensor> probes = params;
  for (auto& p : probes) p.tensor.ClearGrad();
  Backward(forward());

  GradCheckResult result;
  for (auto& p : probes) {
    std::vector<double> analytic(p.tensor.numel(), 0.0);
    if (p.tensor.has_grad()) {
      auto g = p.tensor.grad();
      std::copy(g.begin(), g.end(), analytic.begin());
    }
    p.tensor.ClearGrad();
    auto data = p.tensor.mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double saved = data[i];
      data[i] = saved + epsilon;
      const double plus = Evaluate(forward);
      data[i] = saved - epsilon;
      const double minus = Evaluate(forward);
      data[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      ++result.entries_checked;
      if (rel > result.max_rel_error || std::isnan(rel)) {
        result.max_rel_error = std::isnan(rel) ? INFINITY : rel;
        result.worst_param = p.name;
        result.worst_index = i;
        result.worst_analytic = analytic[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace syngen

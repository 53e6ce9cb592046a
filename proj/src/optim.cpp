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

#include "optim.hpp"

#include <cmath>

#include "error.hpp"

namespace syngen {

void AdamStep(std::vector<ParamGroup>& groups, OptimizerState& state,
              const AdamOptions& options) {
  for (const auto& group : groups) {
    for (const auto& p : group.params) {
      if (!p.tensor.has_grad()) {
        throw Error(ErrorKind::kIncompleteBackward,
                    "parameter '" + p.name + "' in group '" + group.name + "' has no gradient");
      }
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (auto& group : groups) {
    const double lr = group.learning_rate;
    for (auto& p : group.params) {
      auto data = p.tensor.mutable_data();
      auto grad = p.tensor.grad();
      Moments& m = state.moments[p.name];
      if (m.first.size() != data.size()) {
        m.first.assign(data.size(), 0.0);
        m.second.assign(data.size(), 0.0);
      }
      for (std::size_t i = 0; i < data.size(); ++i) {
        const double g = grad[i];
        m.first[i] = options.beta1 * m.first[i] + (1.0 - options.beta1) * g;
        m.second[i] = options.beta2 * m.second[i] + (1.0 - options.beta2) * g * g;
        const double mhat = m.first[i] / correction1;
        const double vhat = m.second[i] / correction2;
        data[i] -= lr * mhat / (std::sqrt(vhat) + options.epsilon);
      }
      p.tensor.ClearGrad();
    }
  }
}

double GradNorm(const std::vector<ParamGroup>& groups) {
  double sq = 0.0;
  for (const auto& group : groups)
    for (const auto& p : group.params)
      for (double g : p.tensor.grad()) sq += g * g;
  return std::sqrt(sq);
}

double ClipGradNorm(std::vector<ParamGroup>& groups, double max_norm) {
  const double norm = GradNorm(groups);
  if (norm > max_norm && norm > 0.0) {
    const double factor = max_norm / norm;
    for (auto& group : groups)
      for (auto& p : group.params)
        if (p.tensor.has_grad())
          for (double& g : p.tensor.mutable_grad()) g *= factor;
  }
  return norm;
}

void ClearGrads(std::vector<ParamGroup>& groups) {
  for (auto& group : groups)
    for (auto& p : group.params) p.tensor.ClearGrad();
}

}  // namespace syngen

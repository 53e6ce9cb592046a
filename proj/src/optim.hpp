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

#ifndef SYNGEN_OPTIM_HPP_
#define SYNGEN_OPTIM_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace syngen {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// A set of trainable tensors sharing one learning rate.
struct ParamGroup {
  std::string name;
  std::vector<NamedTensor> params;
  double learning_rate = 1e-4;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct Moments {
  std::vector<double> first;
  std::vector<double> second;
};

struct OptimizerState {
  std::int64_t step = 0;
  std::map<std::string, Moments> moments;  // keyed by parameter name
};

// One bias-corrected Adam update per group at that group's rate, then clears
// every gradient. A trainable tensor without a gradient is an
// ErrorKind::kIncompleteBackward error and nothing is updated.
void AdamStep(std::vector<ParamGroup>& groups, OptimizerState& state,
              const AdamOptions& options = {});

// Global L2 norm over every gradient in every group.
double GradNorm(const std::vector<ParamGroup>& groups);

// Rescales gradients so their global norm is at most max_norm. Returns the
// norm before clipping.
double ClipGradNorm(std::vector<ParamGroup>& groups, double max_norm);

void ClearGrads(std::vector<ParamGroup>& groups);

}  // namespace syngen

#endif  // SYNGEN_OPTIM_HPP_

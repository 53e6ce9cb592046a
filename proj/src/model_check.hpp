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

#ifndef SYNGEN_MODEL_CHECK_HPP_
#define SYNGEN_MODEL_CHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "data.hpp"
#include "encoder.hpp"
#include "gradcheck.hpp"

namespace syngen {

struct ModelGradCheckOptions {
  Ablation ablation = Ablation::kFull;
  NodeInit node_init = NodeInit::kPosOnly;
  SubtaskKind task = SubtaskKind::kTriplet;
  std::size_t d = 8;
  std::uint64_t seed = 7;
  double epsilon = 1e-5;
};

struct ModelGradCheckReport {
  GradCheckResult overall;
  std::map<std::string, GradCheckResult> per_group;
  std::size_t n = 0;
  double seconds = 0.0;
};

// The five-word sentence the gradient check runs on.
Sentence GradCheckSentence();

// Builds a tiny model over GradCheckSentence and compares the teacher-forced
// loss gradient of every parameter group against central differences.
ModelGradCheckReport CheckModelGradients(const ModelGradCheckOptions& options);

}  // namespace syngen

#endif  // SYNGEN_MODEL_CHECK_HPP_

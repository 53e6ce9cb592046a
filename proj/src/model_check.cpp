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

#include "model_check.hpp"

#include <chrono>

#include "model.hpp"
#include "training.hpp"

namespace syngen {

Sentence GradCheckSentence() {
  Sentence s;
  s.id = "gradcheck";
  s.tokens = {"the", "food", "is", "hot", "."};
  s.pos_tags = {"DET", "NOUN", "AUX", "ADJ", "PUNCT"};
  s.dep_edges = {{2, 1}, {4, 2}, {4, 3}, {0, 4}, {4, 5}};
  s.gold = {GoldTriplet{Span{2, 2}, Span{4, 4}, Polarity::kPositive}};
  ValidateSentence(s);
  return s;
}

ModelGradCheckReport CheckModelGradients(const ModelGradCheckOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Sentence s = GradCheckSentence();
  ModelConfig config;
  config.d = options.d;
  config.heads = 2;
  config.max_positions = 8;
  config.ablation = options.ablation;
  config.node_init = options.node_init;
  config.seed = options.seed;
  const std::vector<Sentence> corpus{s};
  SynGenModel model(config, Vocabulary::Build(corpus));

  const EncodedSentence encoded = model.Prepare(s);
  const auto targets = LinearizeTargets(s, options.task, CandidateIndexSpace(s.size()));
  auto forward = [&] { return model.Loss(encoded, targets); };

  ModelGradCheckReport report;
  report.n = s.size();
  for (const auto& group : model.params().Groups(1.0, 1.0)) {
    if (group.params.empty()) continue;
    GradCheckResult r = FiniteDiffCheck(forward, group.params, options.epsilon);
    if (r.max_rel_error >= report.overall.max_rel_error) {
      const std::size_t total = report.overall.entries_checked + r.entries_checked;
      report.overall = r;
      report.overall.entries_checked = total;
    } else {
      report.overall.entries_checked += r.entries_checked;
    }
    report.per_group[group.name] = r;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace syngen

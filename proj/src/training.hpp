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

#ifndef SYNGEN_TRAINING_HPP_
#define SYNGEN_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "data.hpp"
#include "evaluation.hpp"
#include "inference.hpp"
#include "model.hpp"

namespace syngen {

struct TrainConfig {
  SubtaskKind task = SubtaskKind::kTriplet;
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double lr_gat = 1e-5;
  double lr_other = 1e-4;
  double clip_norm = 5.0;  // <= 0 disables clipping
  bool shuffle = true;
  // Training-set F1 every k epochs (0 = final epoch only). With a dev set
  // the dev F1 is tracked on the same schedule and drives model selection.
  std::size_t eval_every = 0;
  std::size_t beam = 4;
  bool constrained = false;
  std::string checkpoint_dir;  // empty = no per-epoch checkpoints
  ModelConfig model;

  void Validate() const;
};

nlohmann::json TrainConfigToJson(const TrainConfig& c);
// Overlays keys from `j` onto `base`; unknown keys are rejected.
TrainConfig TrainConfigFromJson(const nlohmann::json& j, TrainConfig base = {});

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  std::optional<double> train_f1;
  std::optional<double> dev_f1;
  double seconds = 0.0;
};

struct TrainStats {
  std::vector<EpochStats> epochs;
  double wall_seconds = 0.0;
  std::optional<std::size_t> selected_epoch;  // best dev epoch when a dev set is given
};

void WriteStatsCsv(std::ostream& out, const TrainStats& stats);

struct Evaluation {
  EvalReport report;
  std::vector<DecodeResult> decoded;
  std::vector<ParseResult> parsed;
};

// Decodes every sentence with beam search (options.beam) and scores it.
Evaluation EvaluateModel(const SynGenModel& model, std::span<const Sentence> sentences,
                         const DecodeOptions& options);

// Vocabulary from the training sentences, parameters from config.model.
std::unique_ptr<SynGenModel> CreateModel(std::span<const Sentence> train, const TrainConfig& config);

// Teacher-forced NLL for one sentence under the subtask layout.
Tensor TeacherForcedLoss(const SynGenModel& model, const Sentence& s, SubtaskKind k);

// Mean-over-batch Adam training. Deterministic given the seeds; GAT weights
// move at lr_gat and everything else at lr_other. A non-finite loss raises
// ErrorKind::kDiverged naming the epoch and step.
TrainStats Train(SynGenModel& model, std::span<const Sentence> train,
                 std::span<const Sentence> dev, const TrainConfig& config,
                 const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace syngen

#endif  // SYNGEN_TRAINING_HPP_

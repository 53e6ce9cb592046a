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

// Decoding over the n+5 candidate index space and parsing index sequences
// back into predictions.

#ifndef SYNGEN_INFERENCE_HPP_
#define SYNGEN_INFERENCE_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "data.hpp"
#include "model.hpp"

namespace syngen {

// Source of next-step log-probabilities. Prefixes start with the <s> index.
class StepScorer {
 public:
  virtual ~StepScorer() = default;
  virtual std::size_t num_words() const = 0;
  virtual std::vector<double> LogProbs(std::span<const int> prefix) = 0;
  // Longest prefix (including <s>) the scorer accepts.
  virtual std::size_t max_prefix() const { return std::numeric_limits<std::size_t>::max(); }
};

// Scores with a frozen model; the encoder runs once per sentence.
class ModelScorer : public StepScorer {
 public:
  ModelScorer(const SynGenModel& model, const Sentence& s);

  std::size_t num_words() const override { return encoded_.n; }
  std::vector<double> LogProbs(std::span<const int> prefix) override;
  std::size_t max_prefix() const override { return model_.config().max_positions; }

 private:
  const SynGenModel& model_;
  EncodedSentence encoded_;
  EncoderOutput encoder_out_;
  Tensor bank_;  // [H̄^e; C^d]
};

struct DecodeOptions {
  SubtaskKind kind = SubtaskKind::kTriplet;
  std::size_t beam = 4;
  std::size_t max_steps = 0;  // 0 = DefaultMaxSteps
  bool constrained = false;
};

// Room for one frame per word plus the terminator, capped at 64 steps.
std::size_t DefaultMaxSteps(std::size_t n, SubtaskKind k);

// Generated indices exclude the leading <s>.
struct DecodeResult {
  std::vector<int> indices;
  double score = 0.0;  // Σ log Pro_t
  bool finished = false;
};

DecodeResult GreedyDecode(StepScorer& scorer, const DecodeOptions& options);
// Length-synchronous beam search without length normalization. Falls back to
// the best unfinished hypothesis when nothing reaches </s> within max_steps.
DecodeResult BeamSearch(StepScorer& scorer, const DecodeOptions& options);

// Grammar guard for one frame slot. Frame-start slots admit pointers and
// </s>; other span starts admit pointers; span ends admit pointers at or
// after the pending start; the polarity slot admits the three polarities.
std::vector<bool> ConstrainedMask(std::size_t position_in_frame, SubtaskKind k,
                                  const CandidateIndexSpace& space,
                                  std::span<const int> partial_frame);

struct ParseResult {
  std::vector<Prediction> predictions;
  std::size_t malformed_frames = 0;
  std::size_t duplicates = 0;
};

// Never throws on malformed content: bad frames are dropped and counted.
ParseResult ParseSequence(std::span<const int> indices, SubtaskKind k,
                          const CandidateIndexSpace& space);

}  // namespace syngen

#endif  // SYNGEN_INFERENCE_HPP_

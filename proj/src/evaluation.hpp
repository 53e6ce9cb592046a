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

#ifndef SYNGEN_EVALUATION_HPP_
#define SYNGEN_EVALUATION_HPP_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "data.hpp"
#include "model.hpp"
#include "tensor.hpp"

namespace syngen {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t correct = 0;
};

nlohmann::json EvalReportToJson(const EvalReport& r);

// Micro-averaged exact-match scoring. Both sides are projected onto the
// subtask's fields and deduplicated per sentence before counting.
EvalReport SpanF1(std::span<const std::vector<Prediction>> predicted,
                  std::span<const std::vector<Triplet>> gold, SubtaskKind k);

// Head-averaged self-attention of one semantic encoder layer, taken from a
// full forward pass of the (fused) model. layer < 0 counts from the end.
Tensor AttentionExtract(const SynGenModel& model, const Sentence& s, int layer = -1);

struct PairGap {
  std::string sentence_id;
  Span aspect;
  Span opinion;
  double a_ours = 0.0;
  double a_baseline = 0.0;
  double value_gap = 0.0;
  double rank_gap = 0.0;
  std::optional<double> prop;
};

struct AttentionGapReport {
  double value_gap = 0.0;
  double rank_gap = 0.0;
  double prop = 0.0;
  std::size_t pairs = 0;
  std::size_t prop_excluded = 0;
  std::vector<PairGap> per_pair;
};

// A = mean over aspect-token rows of the attention mass on opinion tokens.
// value = A_ours − A_baseline; prop = (A_ours − A_baseline) / A_ours.
// rank = mean over aspect rows of (baseline rank − ours rank) / (n − 1), with
// 0-based descending ranks among token positions averaged over the opinion
// tokens; positive means the enhanced model ranks the opinion higher.
// Matrices are (n+2)×(n+2) with token i at row/column i.
std::vector<PairGap> AttentionGapPairs(const Tensor& ours, const Tensor& baseline,
                                       std::span<const Triplet> pairs);
AttentionGapReport SummarizeGaps(std::vector<PairGap> pairs);

// Row = query position, column = key position; header carries the tokens.
void WriteAttentionCsv(std::ostream& out, const Tensor& m, std::span<const std::string> labels);
void WriteGapReportCsv(std::ostream& out, const AttentionGapReport& r);

}  // namespace syngen

#endif  // SYNGEN_EVALUATION_HPP_

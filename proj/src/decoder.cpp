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

#include "decoder.hpp"

#include <numeric>
#include <string>

#include "error.hpp"

namespace syngen {

int IndexToToken(int y, std::span<const int> word_ids, const CandidateIndexSpace& space) {
  switch (space.Kind(y)) {
    case IndexKind::kBos: return Vocabulary::kBos;
    case IndexKind::kEos: return Vocabulary::kEos;
    case IndexKind::kPointer: return word_ids[y - 1];
    case IndexKind::kPolarity: return Vocabulary::kNeutral + static_cast<int>(space.PolarityOf(y));
  }
  return Vocabulary::kUnk;
}

Tensor BlendEncoderStates(const Tensor& mlp_out, const Tensor& embedded, double blend_alpha) {
  return Add(Scale(mlp_out, blend_alpha), Scale(embedded, 1.0 - blend_alpha));
}

Tensor StepDistribution(const Tensor& blended, const Tensor& polarity_states, const Tensor& hidden) {
  const Tensor bank = Concat({blended, polarity_states}, 0);
  return Softmax(MatMul(hidden, Transpose(bank)), 1);
}

PointerDecoder::PointerDecoder(ParamStore& store, const Tensor& token_table, std::size_t d,
                               std::size_t heads, std::size_t layers, std::size_t max_positions,
                               double blend_alpha)
    : token_table_(token_table),
      positions_(store.Normal("decoder.positions", {max_positions, d}, 0.1)),
      blend_alpha_(blend_alpha) {
  for (std::size_t l = 0; l < layers; ++l) {
    layers_.emplace_back(store, "decoder.layer" + std::to_string(l), d, heads, 4 * d);
  }
  mlp_in_ = Linear(store, "decoder.mlp.in", d, d);
  mlp_out_ = Linear(store, "decoder.mlp.out", d, d);
}

Tensor PointerDecoder::Hidden(const Tensor& fused, std::span<const int> prefix_indices,
                              std::span<const int> word_ids, DecoderAttention* attn) const {
  if (prefix_indices.empty()) {
    throw Error(ErrorKind::kPrecondition, "decoder: prefix must start with the <s> index");
  }
  if (prefix_indices.front() != 0) {
    throw Error(ErrorKind::kPrecondition, "decoder: prefix must start with the <s> index, got " +
                                              std::to_string(prefix_indices.front()));
  }
  if (prefix_indices.size() > positions_.shape()[0]) {
    throw Error(ErrorKind::kRange, "decoder: prefix of " + std::to_string(prefix_indices.size()) +
                                       " exceeds " + std::to_string(positions_.shape()[0]) +
                                       " positions");
  }
  const CandidateIndexSpace space(word_ids.size());
  std::vector<int> tokens(prefix_indices.size());
  for (std::size_t t = 0; t < prefix_indices.size(); ++t) {
    tokens[t] = IndexToToken(prefix_indices[t], word_ids, space);
  }
  std::vector<int> pos(tokens.size());
  std::iota(pos.begin(), pos.end(), 0);
  Tensor x = Add(EmbeddingLookup(token_table_, tokens), EmbeddingLookup(positions_, pos));
  for (const auto& layer : layers_) {
    std::vector<Tensor>* self_probs = nullptr;
    std::vector<Tensor>* cross_probs = nullptr;
    if (attn) {
      self_probs = &attn->self.emplace_back();
      cross_probs = &attn->cross.emplace_back();
    }
    x = layer.Forward(x, fused, self_probs, cross_probs);
  }
  return x;
}

Tensor PointerDecoder::StepHidden(const Tensor& fused, std::span<const int> prefix_indices,
                                  std::span<const int> word_ids, DecoderAttention* attn) const {
  const Tensor h = Hidden(fused, prefix_indices, word_ids, attn);
  return SliceRows(h, h.rows() - 1, h.rows());
}

PointerDecoder::Candidates PointerDecoder::CandidateStates(const Tensor& fused,
                                                           const Tensor& embedded) const {
  Candidates c;
  c.blended = BlendEncoderStates(Mlp(fused), embedded, blend_alpha_);
  const int polarity_ids[] = {Vocabulary::kNeutral, Vocabulary::kPositive, Vocabulary::kNegative};
  c.polarity = EmbeddingLookup(token_table_, polarity_ids);
  return c;
}

}  // namespace syngen

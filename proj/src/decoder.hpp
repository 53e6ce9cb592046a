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

// Pointer-network decoder. Previous output indices are mapped back to
// vocabulary tokens, run through a causal transformer decoder with
// cross-attention over the fused encoder states, and the resulting hidden
// state is scored against n+2 blended encoder rows plus three polarity
// embeddings.

#ifndef SYNGEN_DECODER_HPP_
#define SYNGEN_DECODER_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "data.hpp"
#include "layers.hpp"
#include "tensor.hpp"

namespace syngen {

// Candidate index -> vocabulary id. word_ids holds the ids of x_1..x_n.
int IndexToToken(int y, std::span<const int> word_ids, const CandidateIndexSpace& space);

// α·mlp_out + (1−α)·embedded
Tensor BlendEncoderStates(const Tensor& mlp_out, const Tensor& embedded, double blend_alpha);

// Pro_t for every row of `hidden`: softmax([H̄^e; C^d] h_t).
Tensor StepDistribution(const Tensor& blended, const Tensor& polarity_states, const Tensor& hidden);

struct DecoderAttention {
  std::vector<std::vector<Tensor>> self;   // [layer][head]
  std::vector<std::vector<Tensor>> cross;  // [layer][head]
};

class PointerDecoder {
 public:
  PointerDecoder() = default;
  PointerDecoder(ParamStore& store, const Tensor& token_table, std::size_t d, std::size_t heads,
                 std::size_t layers, std::size_t max_positions, double blend_alpha);

  // Hidden states for every position of the converted prefix (T×d). Row t
  // depends only on rows 0..t of the prefix.
  Tensor Hidden(const Tensor& fused, std::span<const int> prefix_indices,
                std::span<const int> word_ids, DecoderAttention* attn = nullptr) const;

  // Last row of Hidden: h^d_t for the next step.
  Tensor StepHidden(const Tensor& fused, std::span<const int> prefix_indices,
                    std::span<const int> word_ids, DecoderAttention* attn = nullptr) const;

  struct Candidates {
    Tensor blended;    // H̄^e, (n+2)×d
    Tensor polarity;   // C^d, 3×d
  };
  Candidates CandidateStates(const Tensor& fused, const Tensor& embedded) const;

  Tensor Mlp(const Tensor& x) const { return mlp_out_.Forward(Gelu(mlp_in_.Forward(x))); }

  double blend_alpha() const { return blend_alpha_; }
  void set_blend_alpha(double a) { blend_alpha_ = a; }

 private:
  Tensor token_table_;
  Tensor positions_;
  std::vector<DecoderLayer> layers_;
  Linear mlp_in_, mlp_out_;
  double blend_alpha_ = 0.5;
};

}  // namespace syngen

#endif  // SYNGEN_DECODER_HPP_

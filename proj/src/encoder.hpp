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

// The dual-channel encoder: a compact transformer over the sentence
// (semantic channel), a two-layer graph attention network over the
// dependency graph (syntactic channel), and a per-position sigmoid gate that
// decides how much syntactic signal is added to each semantic state.

#ifndef SYNGEN_ENCODER_HPP_
#define SYNGEN_ENCODER_HPP_

#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "data.hpp"
#include "layers.hpp"
#include "tensor.hpp"

namespace syngen {

enum class NodeInit { kPosOnly, kTokenOnly, kPosPlusToken };
std::string_view NodeInitName(NodeInit v);
NodeInit ParseNodeInit(std::string_view name);

enum class Ablation { kFull, kNoGraph, kNoGate, kNoGraphNoGate };
std::string_view AblationName(Ablation v);
Ablation ParseAblation(std::string_view name);
inline bool UsesGraph(Ablation a) { return a == Ablation::kFull || a == Ablation::kNoGate; }
inline bool UsesGate(Ablation a) { return a == Ablation::kFull || a == Ablation::kNoGraph; }

// A sentence mapped onto model ids.
struct EncodedSentence {
  std::size_t n = 0;
  std::vector<int> token_ids;  // n+2 entries: <s>, x_1..x_n, </s>
  std::vector<int> pos_ids;    // n entries
  AdjacencyMatrix adjacency{0};

  std::span<const int> word_ids() const { return std::span(token_ids).subspan(1, n); }
};

EncodedSentence EncodeSentence(const Sentence& s, const Vocabulary& vocab);

// Single-head graph attention layer:
//   e_ij = LeakyReLU([h_i W ‖ h_j W] · aᵀ), α_i = softmax over N(i),
//   h'_i = Σ_j α_ij h_j W.
struct GatLayer {
  Tensor weight;     // d × d
  Tensor attention;  // 1 × 2d
  double leaky_slope = 0.2;
};

// Returns the updated node states; α (n×n, zero off the neighbourhood) is
// copied into *alpha when requested.
Tensor GatLayerForward(const Tensor& h, const AdjacencyMatrix& a, const GatLayer& layer,
                       Tensor* alpha = nullptr);

// [0; h; 0]
Tensor ZeroPadRows(const Tensor& h);

struct EncoderDiagnostics {
  std::vector<std::vector<Tensor>> semantic_attention;  // [layer][head], (n+2)×(n+2)
  std::vector<Tensor> gat_alpha;                         // per GAT layer, n×n
  Tensor gate;                                           // (n+2)×1 when the gate runs
};

class SemanticChannel {
 public:
  SemanticChannel() = default;
  SemanticChannel(ParamStore& store, const Tensor& token_table, std::size_t d, std::size_t heads,
                  std::size_t layers, std::size_t max_positions);

  struct Output {
    Tensor embedded;  // E^se, (n+2)×d
    Tensor hidden;    // H^se, (n+2)×d
  };

  // token_ids includes <s> and </s>.
  Output Forward(std::span<const int> token_ids, EncoderDiagnostics* diag = nullptr) const;

  const Tensor& positions() const { return positions_; }

 private:
  Tensor token_table_;
  Tensor positions_;
  std::vector<EncoderLayer> layers_;
};

class SyntacticChannel {
 public:
  static constexpr std::size_t kNumLayers = 2;

  SyntacticChannel() = default;
  SyntacticChannel(ParamStore& store, std::size_t d, NodeInit init, bool with_graph,
                   double leaky_slope);
  SyntacticChannel(SyntacticChannel&& other) noexcept;
  SyntacticChannel& operator=(SyntacticChannel&& other) noexcept;

  NodeInit node_init() const { return init_; }
  bool has_graph() const { return !layers_.empty(); }
  const std::vector<GatLayer>& layers() const { return layers_; }
  const Tensor& pos_table() const { return pos_table_; }

  // h⁰ per the node-initialization strategy. semantic_token_states are rows
  // 1..n of H^se and are required unless the strategy is pos-only.
  Tensor InitialNodes(std::span<const int> pos_ids,
                      const std::optional<Tensor>& semantic_token_states) const;

  // Zero-padded (n+2)×d output. Without a graph the padded initial nodes are
  // returned unchanged.
  Tensor Forward(std::span<const int> pos_ids, const AdjacencyMatrix& a,
                 const std::optional<Tensor>& semantic_token_states,
                 EncoderDiagnostics* diag = nullptr) const;

  std::size_t gat_calls() const { return gat_calls_.load(); }
  void reset_gat_calls() { gat_calls_ = 0; }

 private:
  NodeInit init_ = NodeInit::kPosOnly;
  Tensor pos_table_;
  std::vector<GatLayer> layers_;
  mutable std::atomic<std::size_t> gat_calls_{0};
};

struct GateFusion {
  Tensor weight;  // d × 1
  Tensor bias;    // 1 × 1

  // H^e = H^se + σ(H^se · w + b) ⊙ H^sy, the scalar gate broadcast over d.
  Tensor Forward(const Tensor& semantic, const Tensor& syntactic, Tensor* gate = nullptr) const;
};

// Gate forced to 1: plain addition.
Tensor AddChannels(const Tensor& semantic, const Tensor& syntactic);

struct EncoderOutput {
  Tensor embedded;   // E^se
  Tensor semantic;   // H^se
  Tensor syntactic;  // H^sy (zero-padded)
  Tensor fused;      // H^e
};

class DualChannelEncoder {
 public:
  DualChannelEncoder() = default;
  DualChannelEncoder(ParamStore& store, const Tensor& token_table, std::size_t d,
                     std::size_t heads, std::size_t layers, std::size_t max_positions,
                     NodeInit init, Ablation ablation, double leaky_slope);

  EncoderOutput Forward(const EncodedSentence& s, EncoderDiagnostics* diag = nullptr) const;

  Ablation ablation() const { return ablation_; }
  const SemanticChannel& semantic() const { return semantic_; }
  const SyntacticChannel& syntactic() const { return syntactic_; }
  SyntacticChannel& syntactic() { return syntactic_; }
  const std::optional<GateFusion>& gate() const { return gate_; }

 private:
  Ablation ablation_ = Ablation::kFull;
  SemanticChannel semantic_;
  SyntacticChannel syntactic_;
  std::optional<GateFusion> gate_;
};

}  // namespace syngen

#endif  // SYNGEN_ENCODER_HPP_

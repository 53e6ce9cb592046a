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

#include "encoder.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace syngen {

std::string_view NodeInitName(NodeInit v) {
  switch (v) {
    case NodeInit::kPosOnly: return "pos_only";
    case NodeInit::kTokenOnly: return "token_only";
    case NodeInit::kPosPlusToken: return "pos_plus_token";
  }
  return "pos_only";
}

NodeInit ParseNodeInit(std::string_view name) {
  if (name == "pos_only") return NodeInit::kPosOnly;
  if (name == "token_only") return NodeInit::kTokenOnly;
  if (name == "pos_plus_token") return NodeInit::kPosPlusToken;
  throw Error(ErrorKind::kConfiguration, "unknown node init strategy '" + std::string(name) + "'");
}

std::string_view AblationName(Ablation v) {
  switch (v) {
    case Ablation::kFull: return "full";
    case Ablation::kNoGraph: return "no_graph";
    case Ablation::kNoGate: return "no_gate";
    case Ablation::kNoGraphNoGate: return "no_graph_no_gate";
  }
  return "full";
}

Ablation ParseAblation(std::string_view name) {
  if (name == "full") return Ablation::kFull;
  if (name == "no_graph") return Ablation::kNoGraph;
  if (name == "no_gate") return Ablation::kNoGate;
  if (name == "no_graph_no_gate") return Ablation::kNoGraphNoGate;
  throw Error(ErrorKind::kConfiguration, "unknown ablation '" + std::string(name) + "'");
}

EncodedSentence EncodeSentence(const Sentence& s, const Vocabulary& vocab) {
  if (s.size() == 0) throw Error(ErrorKind::kEmptyInput, "sentence has no tokens");
  EncodedSentence e;
  e.n = s.size();
  e.token_ids.reserve(e.n + 2);
  e.token_ids.push_back(Vocabulary::kBos);
  for (const auto& t : s.tokens) e.token_ids.push_back(vocab.Id(t));
  e.token_ids.push_back(Vocabulary::kEos);
  for (const auto& p : s.pos_tags) e.pos_ids.push_back(PosId(p));
  e.adjacency = BuildAdjacency(s);
  return e;
}

// ---------------------------------------------------------------------------
// Graph attention

Tensor GatLayerForward(const Tensor& h, const AdjacencyMatrix& a, const GatLayer& layer,
                       Tensor* alpha) {
  const std::size_t n = h.rows();
  const std::size_t d = layer.weight.shape()[1];
  if (a.n() != n) {
    throw Error(ErrorKind::kDimension, "gat: " + std::to_string(n) + " node rows but adjacency over " +
                                           std::to_string(a.n()) + " nodes");
  }
  if (layer.attention.numel() != 2 * d) {
    throw Error(ErrorKind::kDimension, "gat: attention vector " + ShapeString(layer.attention.shape()) +
                                           " does not match width " + std::to_string(d));
  }
  Mask neighbours{{n, n}, std::vector<std::uint8_t>(a.bits().begin(), a.bits().end())};

  const Tensor hw = MatMul(h, layer.weight);
  const Tensor a_self = SliceCols(layer.attention, 0, d);
  const Tensor a_other = SliceCols(layer.attention, d, 2 * d);
  // [h_i W ‖ h_j W] · aᵀ splits into a per-row and a per-column term.
  const Tensor self_term = MatMul(hw, Transpose(a_self));                 // n×1
  const Tensor other_term = Transpose(MatMul(hw, Transpose(a_other)));   // 1×n
  const Tensor scores = LeakyRelu(OuterSum(self_term, other_term), layer.leaky_slope);
  const Tensor coeff = Softmax(scores, 1, &neighbours);
  if (alpha) *alpha = Tensor::FromData(coeff.shape(), coeff.ToVector());
  return MatMul(coeff, hw);
}

Tensor ZeroPadRows(const Tensor& h) {
  const std::size_t d = h.cols();
  return Concat({Tensor::Zeros({1, d}), h, Tensor::Zeros({1, d})}, 0);
}

// ---------------------------------------------------------------------------
// Semantic channel

SemanticChannel::SemanticChannel(ParamStore& store, const Tensor& token_table, std::size_t d,
                                 std::size_t heads, std::size_t layers, std::size_t max_positions)
    : token_table_(token_table),
      positions_(store.Normal("semantic.positions", {max_positions, d}, 0.1)) {
  for (std::size_t l = 0; l < layers; ++l) {
    layers_.emplace_back(store, "semantic.layer" + std::to_string(l), d, heads, 4 * d);
  }
}

SemanticChannel::Output SemanticChannel::Forward(std::span<const int> token_ids,
                                                 EncoderDiagnostics* diag) const {
  if (token_ids.size() < 3) throw Error(ErrorKind::kEmptyInput, "semantic channel: n must be >= 1");
  if (token_ids.size() > positions_.shape()[0]) {
    throw Error(ErrorKind::kRange, "semantic channel: " + std::to_string(token_ids.size()) +
                                       " positions exceed the table of " +
                                       std::to_string(positions_.shape()[0]));
  }
  std::vector<int> pos(token_ids.size());
  std::iota(pos.begin(), pos.end(), 0);
  Output out;
  out.embedded = Add(EmbeddingLookup(token_table_, token_ids), EmbeddingLookup(positions_, pos));
  Tensor x = out.embedded;
  for (const auto& layer : layers_) {
    std::vector<Tensor>* probs = nullptr;
    if (diag) probs = &diag->semantic_attention.emplace_back();
    x = layer.Forward(x, probs);
  }
  out.hidden = x;
  return out;
}

// ---------------------------------------------------------------------------
// Syntactic channel

SyntacticChannel::SyntacticChannel(ParamStore& store, std::size_t d, NodeInit init,
                                   bool with_graph, double leaky_slope)
    : init_(init) {
  if (init != NodeInit::kTokenOnly) {
    pos_table_ = store.Normal("syntactic.pos_embed", {kPosVocabSize, d}, 1.0 / std::sqrt(static_cast<double>(d)));
  }
  if (with_graph) {
    const double w_std = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t l = 0; l < kNumLayers; ++l) {
      const std::string name = "syntactic.gat" + std::to_string(l);
      GatLayer layer;
      layer.weight = store.Normal(name + ".weight", {d, d}, w_std, kGatGroup);
      layer.attention = store.Normal(name + ".attention", {1, 2 * d}, w_std, kGatGroup);
      layer.leaky_slope = leaky_slope;
      layers_.push_back(layer);
    }
  }
}

SyntacticChannel::SyntacticChannel(SyntacticChannel&& other) noexcept
    : init_(other.init_),
      pos_table_(std::move(other.pos_table_)),
      layers_(std::move(other.layers_)),
      gat_calls_(other.gat_calls_.load()) {}

SyntacticChannel& SyntacticChannel::operator=(SyntacticChannel&& other) noexcept {
  init_ = other.init_;
  pos_table_ = std::move(other.pos_table_);
  layers_ = std::move(other.layers_);
  gat_calls_ = other.gat_calls_.load();
  return *this;
}

Tensor SyntacticChannel::InitialNodes(std::span<const int> pos_ids,
                                      const std::optional<Tensor>& semantic_token_states) const {
  if (init_ != NodeInit::kPosOnly && !semantic_token_states) {
    throw Error(ErrorKind::kConfiguration, std::string("node init '") +
                                               std::string(NodeInitName(init_)) +
                                               "' needs the semantic token states");
  }
  switch (init_) {
    case NodeInit::kPosOnly: return EmbeddingLookup(pos_table_, pos_ids);
    case NodeInit::kTokenOnly: return *semantic_token_states;
    case NodeInit::kPosPlusToken:
      return Add(EmbeddingLookup(pos_table_, pos_ids), *semantic_token_states);
  }
  return {};
}

Tensor SyntacticChannel::Forward(std::span<const int> pos_ids, const AdjacencyMatrix& a,
                                 const std::optional<Tensor>& semantic_token_states,
                                 EncoderDiagnostics* diag) const {
  Tensor h = InitialNodes(pos_ids, semantic_token_states);
  for (const auto& layer : layers_) {
    ++gat_calls_;
    Tensor alpha;
    h = GatLayerForward(h, a, layer, diag ? &alpha : nullptr);
    if (diag) diag->gat_alpha.push_back(alpha);
  }
  return ZeroPadRows(h);
}

// ---------------------------------------------------------------------------
// Fusion

Tensor GateFusion::Forward(const Tensor& semantic, const Tensor& syntactic, Tensor* gate) const {
  if (semantic.shape() != syntactic.shape()) {
    throw Error(ErrorKind::kDimension, "gate: semantic " + ShapeString(semantic.shape()) +
                                           " vs syntactic " + ShapeString(syntactic.shape()));
  }
  const Tensor g = Sigmoid(AddRowBroadcast(MatMul(semantic, weight), bias));
  if (gate) *gate = Tensor::FromData(g.shape(), g.ToVector());
  return Add(semantic, ScaleRows(g, syntactic));
}

Tensor AddChannels(const Tensor& semantic, const Tensor& syntactic) {
  if (semantic.shape() != syntactic.shape()) {
    throw Error(ErrorKind::kDimension, "add channels: semantic " + ShapeString(semantic.shape()) +
                                           " vs syntactic " + ShapeString(syntactic.shape()));
  }
  return Add(semantic, syntactic);
}

// ---------------------------------------------------------------------------

DualChannelEncoder::DualChannelEncoder(ParamStore& store, const Tensor& token_table, std::size_t d,
                                       std::size_t heads, std::size_t layers,
                                       std::size_t max_positions, NodeInit init,
                                       Ablation ablation, double leaky_slope)
    : ablation_(ablation),
      semantic_(store, token_table, d, heads, layers, max_positions),
      syntactic_(store, d, init, UsesGraph(ablation), leaky_slope) {
  if (UsesGate(ablation)) {
    gate_ = GateFusion{store.Normal("gate.weight", {d, 1}, 0.01), store.Constant("gate.bias", {1, 1}, 0.0)};
  }
}

EncoderOutput DualChannelEncoder::Forward(const EncodedSentence& s,
                                          EncoderDiagnostics* diag) const {
  EncoderOutput out;
  const auto sem = semantic_.Forward(s.token_ids, diag);
  out.embedded = sem.embedded;
  out.semantic = sem.hidden;
  std::optional<Tensor> token_states;
  if (syntactic_.node_init() != NodeInit::kPosOnly) token_states = SliceRows(sem.hidden, 1, s.n + 1);
  out.syntactic = syntactic_.Forward(s.pos_ids, s.adjacency, token_states, diag);
  if (gate_) {
    Tensor g;
    out.fused = gate_->Forward(out.semantic, out.syntactic, diag ? &g : nullptr);
    if (diag) diag->gate = g;
  } else {
    out.fused = AddChannels(out.semantic, out.syntactic);
  }
  return out;
}

}  // namespace syngen

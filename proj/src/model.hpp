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

#ifndef SYNGEN_MODEL_HPP_
#define SYNGEN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "data.hpp"
#include "decoder.hpp"
#include "encoder.hpp"
#include "layers.hpp"

namespace syngen {

struct ModelConfig {
  std::size_t d = 64;
  std::size_t heads = 4;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t max_positions = 128;
  double blend_alpha = 0.5;
  double leaky_slope = 0.2;
  double embed_std = 0.3;
  NodeInit node_init = NodeInit::kPosOnly;
  Ablation ablation = Ablation::kFull;
  std::uint64_t seed = 1;

  // Raises ErrorKind::kConfiguration.
  void Validate() const;
};

nlohmann::json ModelConfigToJson(const ModelConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

// Encoder, decoder and every trainable tensor, keyed by name. Parameters in
// the "gat" group are exactly the graph attention weights.
class SynGenModel {
 public:
  SynGenModel(const ModelConfig& config, Vocabulary vocab);
  SynGenModel(const SynGenModel&) = delete;
  SynGenModel& operator=(const SynGenModel&) = delete;

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const Tensor& token_table() const { return token_table_; }
  DualChannelEncoder& encoder() { return encoder_; }
  const DualChannelEncoder& encoder() const { return encoder_; }
  PointerDecoder& decoder() { return decoder_; }
  const PointerDecoder& decoder() const { return decoder_; }

  EncodedSentence Prepare(const Sentence& s) const;
  EncoderOutput Encode(const EncodedSentence& s, EncoderDiagnostics* diag = nullptr) const;
  PointerDecoder::Candidates Candidates(const EncoderOutput& enc) const;

  // Pro_t for every prefix position, T×(n+5).
  Tensor Distributions(const EncoderOutput& enc, const PointerDecoder::Candidates& cand,
                       const EncodedSentence& s, std::span<const int> prefix,
                       DecoderAttention* attn = nullptr) const;

  // Teacher-forced mean negative log-likelihood over the target steps.
  Tensor Loss(const EncodedSentence& s, std::span<const int> targets) const;

  // Copies of every parameter buffer, in registration order.
  std::vector<std::vector<double>> Snapshot() const;
  void Restore(const std::vector<std::vector<double>>& snapshot);

  nlohmann::json ToJson() const;
  static std::unique_ptr<SynGenModel> FromJson(const nlohmann::json& j);
  void Save(const std::string& path) const;
  static std::unique_ptr<SynGenModel> Load(const std::string& path);

 private:
  ModelConfig config_;
  Vocabulary vocab_;
  ParamStore params_;
  Tensor token_table_;
  DualChannelEncoder encoder_;
  PointerDecoder decoder_;
};

}  // namespace syngen

#endif  // SYNGEN_MODEL_HPP_

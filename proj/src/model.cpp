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

#include "model.hpp"

#include <fstream>
#include <sstream>

#include "error.hpp"

namespace syngen {

using nlohmann::json;

void ModelConfig::Validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::kConfiguration, what); };
  if (d < 4) bad("d must be >= 4");
  if (heads == 0 || d % heads != 0) bad("d must be divisible by heads");
  if (encoder_layers == 0) bad("encoder_layers must be >= 1");
  if (decoder_layers == 0) bad("decoder_layers must be >= 1");
  if (max_positions < 3) bad("max_positions must be >= 3");
  if (!(blend_alpha >= 0.0 && blend_alpha <= 1.0)) bad("blend_alpha must lie in [0, 1]");
  if (!(leaky_slope > 0.0 && leaky_slope < 1.0)) bad("leaky_slope must lie in (0, 1)");
  if (!(embed_std > 0.0)) bad("embed_std must be positive");
}

json ModelConfigToJson(const ModelConfig& c) {
  return json{{"d", c.d},
              {"heads", c.heads},
              {"encoder_layers", c.encoder_layers},
              {"decoder_layers", c.decoder_layers},
              {"max_positions", c.max_positions},
              {"blend_alpha", c.blend_alpha},
              {"leaky_slope", c.leaky_slope},
              {"embed_std", c.embed_std},
              {"node_init", std::string(NodeInitName(c.node_init))},
              {"ablation", std::string(AblationName(c.ablation))},
              {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const json& j) {
  ModelConfig c;
  if (!j.is_object()) throw Error(ErrorKind::kConfiguration, "model config must be an object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "d") c.d = value.get<std::size_t>();
      else if (key == "heads") c.heads = value.get<std::size_t>();
      else if (key == "encoder_layers") c.encoder_layers = value.get<std::size_t>();
      else if (key == "decoder_layers") c.decoder_layers = value.get<std::size_t>();
      else if (key == "max_positions") c.max_positions = value.get<std::size_t>();
      else if (key == "blend_alpha") c.blend_alpha = value.get<double>();
      else if (key == "leaky_slope") c.leaky_slope = value.get<double>();
      else if (key == "embed_std") c.embed_std = value.get<double>();
      else if (key == "node_init") c.node_init = ParseNodeInit(value.get<std::string>());
      else if (key == "ablation") c.ablation = ParseAblation(value.get<std::string>());
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw Error(ErrorKind::kConfiguration, "unknown model config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("model config: ") + e.what());
  }
  c.Validate();
  return c;
}

namespace {

ParamStore MakeStore(const ModelConfig& config) {
  config.Validate();
  return ParamStore(config.seed);
}

}  // namespace

SynGenModel::SynGenModel(const ModelConfig& config, Vocabulary vocab)
    : config_(config),
      vocab_(std::move(vocab)),
      params_(MakeStore(config)),
      token_table_(params_.Normal("embed.tokens", {vocab_.size(), config.d}, config.embed_std)),
      encoder_(params_, token_table_, config.d, config.heads, config.encoder_layers,
               config.max_positions, config.node_init, config.ablation, config.leaky_slope),
      decoder_(params_, token_table_, config.d, config.heads, config.decoder_layers,
               config.max_positions, config.blend_alpha) {}

EncodedSentence SynGenModel::Prepare(const Sentence& s) const { return EncodeSentence(s, vocab_); }

EncoderOutput SynGenModel::Encode(const EncodedSentence& s, EncoderDiagnostics* diag) const {
  return encoder_.Forward(s, diag);
}

PointerDecoder::Candidates SynGenModel::Candidates(const EncoderOutput& enc) const {
  return decoder_.CandidateStates(enc.fused, enc.embedded);
}

Tensor SynGenModel::Distributions(const EncoderOutput& enc, const PointerDecoder::Candidates& cand,
                                  const EncodedSentence& s, std::span<const int> prefix,
                                  DecoderAttention* attn) const {
  const Tensor hidden = decoder_.Hidden(enc.fused, prefix, s.word_ids(), attn);
  return StepDistribution(cand.blended, cand.polarity, hidden);
}

Tensor SynGenModel::Loss(const EncodedSentence& s, std::span<const int> targets) const {
  if (targets.empty()) throw Error(ErrorKind::kPrecondition, "loss: empty target sequence");
  const CandidateIndexSpace space(s.n);
  for (int y : targets) space.Kind(y);  // range check
  const EncoderOutput enc = Encode(s);
  const auto cand = Candidates(enc);
  const std::vector<int> inputs = DecoderInputs(targets);
  const Tensor probs = Distributions(enc, cand, s, inputs);
  return Scale(Mean(Log(GatherCols(probs, targets))), -1.0);
}

std::vector<std::vector<double>> SynGenModel::Snapshot() const {
  std::vector<std::vector<double>> out;
  for (const auto& e : params_.entries()) out.push_back(e.tensor.ToVector());
  return out;
}

void SynGenModel::Restore(const std::vector<std::vector<double>>& snapshot) {
  const auto& entries = params_.entries();
  if (snapshot.size() != entries.size()) {
    throw Error(ErrorKind::kIncompatible, "snapshot does not match the parameter set");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor t = entries[i].tensor;
    auto data = t.mutable_data();
    if (snapshot[i].size() != data.size()) {
      throw Error(ErrorKind::kIncompatible, "snapshot size mismatch for '" + entries[i].name + "'");
    }
    std::copy(snapshot[i].begin(), snapshot[i].end(), data.begin());
  }
}

json SynGenModel::ToJson() const {
  json params = json::object();
  for (const auto& e : params_.entries()) {
    params[e.name] = json{{"shape", e.tensor.shape()}, {"data", e.tensor.ToVector()}};
  }
  return json{{"format", "syngen-checkpoint-1"},
              {"config", ModelConfigToJson(config_)},
              {"vocab", vocab_.tokens()},
              {"params", params}};
}

std::unique_ptr<SynGenModel> SynGenModel::FromJson(const json& j) {
  if (!j.is_object() || j.value("format", "") != "syngen-checkpoint-1") {
    throw Error(ErrorKind::kParse, "not a syngen checkpoint");
  }
  std::unique_ptr<SynGenModel> model;
  try {
    auto vocab = Vocabulary::FromTokens(j.at("vocab").get<std::vector<std::string>>());
    model = std::make_unique<SynGenModel>(ModelConfigFromJson(j.at("config")), std::move(vocab));
    const json& params = j.at("params");
    if (params.size() != model->params_.entries().size()) {
      throw Error(ErrorKind::kIncompatible, "checkpoint holds " + std::to_string(params.size()) +
                                                " tensors, model expects " +
                                                std::to_string(model->params_.entries().size()));
    }
    for (const auto& e : model->params_.entries()) {
      auto it = params.find(e.name);
      if (it == params.end()) {
        throw Error(ErrorKind::kIncompatible, "checkpoint lacks parameter '" + e.name + "'");
      }
      const auto shape = it->at("shape").get<Shape>();
      auto data = it->at("data").get<std::vector<double>>();
      if (shape != e.tensor.shape() || data.size() != e.tensor.numel()) {
        throw Error(ErrorKind::kIncompatible, "parameter '" + e.name + "' has shape " +
                                                  ShapeString(shape) + ", model expects " +
                                                  ShapeString(e.tensor.shape()));
      }
      Tensor t = e.tensor;
      std::copy(data.begin(), data.end(), t.mutable_data().begin());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("checkpoint: ") + e.what());
  }
  return model;
}

void SynGenModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write checkpoint '" + path + "'");
  out << ToJson().dump() << '\n';
}

std::unique_ptr<SynGenModel> SynGenModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open checkpoint '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "checkpoint '" + path + "': " + e.what());
  }
  return FromJson(j);
}

}  // namespace syngen

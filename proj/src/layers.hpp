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

// Parameter registry and the transformer building blocks shared by the
// semantic channel and the pointer decoder.

#ifndef SYNGEN_LAYERS_HPP_
#define SYNGEN_LAYERS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "optim.hpp"
#include "tensor.hpp"

namespace syngen {

inline constexpr const char* kGatGroup = "gat";
inline constexpr const char* kOtherGroup = "other";

struct ParamEntry {
  std::string name;
  std::string group;
  Tensor tensor;
};

class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : rng_(seed) {}

  Tensor Normal(const std::string& name, const Shape& shape, double stddev,
                const std::string& group = kOtherGroup);
  Tensor Constant(const std::string& name, const Shape& shape, double value,
                  const std::string& group = kOtherGroup);

  const std::vector<ParamEntry>& entries() const { return entries_; }
  bool Contains(const std::string& name) const { return index_.count(name) != 0; }
  Tensor Get(const std::string& name) const;
  std::vector<NamedTensor> All() const;
  std::vector<NamedTensor> InGroup(const std::string& group) const;
  // Always returns {gat, other} in that order; either may be empty.
  std::vector<ParamGroup> Groups(double lr_gat, double lr_other) const;
  std::size_t TotalSize() const;

 private:
  Tensor Register(const std::string& name, const std::string& group, Tensor t);

  std::mt19937_64 rng_;
  std::vector<ParamEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Linear {
  Tensor weight;  // in × out
  Tensor bias;    // 1 × out; undefined when built without bias

  Linear() = default;
  Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
         bool with_bias = true);
  Tensor Forward(const Tensor& x) const;
};

struct LayerNormParams {
  Tensor gain;
  Tensor bias;

  LayerNormParams() = default;
  LayerNormParams(ParamStore& store, const std::string& name, std::size_t d);
  Tensor Forward(const Tensor& x) const { return LayerNorm(x, gain, bias); }
};

// Multi-head scaled dot-product attention. Head probabilities are copied into
// head_probs when it is non-null.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& name, std::size_t d,
                     std::size_t heads);

  Tensor Forward(const Tensor& query_in, const Tensor& memory, bool causal,
                 std::vector<Tensor>* head_probs = nullptr) const;

 private:
  Linear q_, k_, v_, o_;
  std::size_t d_ = 0;
  std::size_t heads_ = 1;
};

struct FeedForward {
  Linear in;
  Linear out;

  FeedForward() = default;
  FeedForward(ParamStore& store, const std::string& name, std::size_t d, std::size_t hidden);
  Tensor Forward(const Tensor& x) const { return out.Forward(Gelu(in.Forward(x))); }
};

// Post-norm encoder block: x = LN(x + SelfAttn(x)); x = LN(x + FFN(x)).
class EncoderLayer {
 public:
  EncoderLayer() = default;
  EncoderLayer(ParamStore& store, const std::string& name, std::size_t d, std::size_t heads,
               std::size_t ffn);
  Tensor Forward(const Tensor& x, std::vector<Tensor>* head_probs = nullptr) const;

 private:
  MultiHeadAttention attn_;
  LayerNormParams norm1_, norm2_;
  FeedForward ffn_;
};

// Post-norm decoder block with causal self-attention and cross-attention
// over the encoder memory.
class DecoderLayer {
 public:
  DecoderLayer() = default;
  DecoderLayer(ParamStore& store, const std::string& name, std::size_t d, std::size_t heads,
               std::size_t ffn);
  Tensor Forward(const Tensor& x, const Tensor& memory, std::vector<Tensor>* self_probs = nullptr,
                 std::vector<Tensor>* cross_probs = nullptr) const;

 private:
  MultiHeadAttention self_attn_, cross_attn_;
  LayerNormParams norm1_, norm2_, norm3_;
  FeedForward ffn_;
};

}  // namespace syngen

#endif  // SYNGEN_LAYERS_HPP_

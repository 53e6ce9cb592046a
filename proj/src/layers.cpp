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

#include "layers.hpp"

#include <cmath>

#include "error.hpp"

namespace syngen {

Tensor ParamStore::Register(const std::string& name, const std::string& group, Tensor t) {
  if (!index_.emplace(name, entries_.size()).second) {
    throw Error(ErrorKind::kConfiguration, "duplicate parameter name '" + name + "'");
  }
  entries_.push_back(ParamEntry{name, group, t});
  return t;
}

Tensor ParamStore::Normal(const std::string& name, const Shape& shape, double stddev,
                          const std::string& group) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> data(NumElements(shape));
  for (double& v : data) v = dist(rng_);
  return Register(name, group, Tensor::FromData(shape, std::move(data), true));
}

Tensor ParamStore::Constant(const std::string& name, const Shape& shape, double value,
                            const std::string& group) {
  return Register(name, group, Tensor::Full(shape, value, true));
}

Tensor ParamStore::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorKind::kConfiguration, "no parameter '" + name + "'");
  return entries_[it->second].tensor;
}

std::vector<NamedTensor> ParamStore::All() const {
  std::vector<NamedTensor> out;
  for (const auto& e : entries_) out.push_back({e.name, e.tensor});
  return out;
}

std::vector<NamedTensor> ParamStore::InGroup(const std::string& group) const {
  std::vector<NamedTensor> out;
  for (const auto& e : entries_)
    if (e.group == group) out.push_back({e.name, e.tensor});
  return out;
}

std::vector<ParamGroup> ParamStore::Groups(double lr_gat, double lr_other) const {
  return {ParamGroup{kGatGroup, InGroup(kGatGroup), lr_gat},
          ParamGroup{kOtherGroup, InGroup(kOtherGroup), lr_other}};
}

std::size_t ParamStore::TotalSize() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

Linear::Linear(ParamStore& store, const std::string& name, std::size_t in, std::size_t out,
               bool with_bias)
    : weight(store.Normal(name + ".weight", {in, out}, 1.0 / std::sqrt(static_cast<double>(in)))) {
  if (with_bias) bias = store.Constant(name + ".bias", {1, out}, 0.0);
}

Tensor Linear::Forward(const Tensor& x) const {
  const Tensor y = MatMul(x, weight);
  return bias.defined() ? AddRowBroadcast(y, bias) : y;
}

LayerNormParams::LayerNormParams(ParamStore& store, const std::string& name, std::size_t d)
    : gain(store.Constant(name + ".gain", {1, d}, 1.0)),
      bias(store.Constant(name + ".bias", {1, d}, 0.0)) {}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& name, std::size_t d,
                                       std::size_t heads)
    : q_(store, name + ".q", d, d),
      // A key bias shifts every score in a row equally and cancels in softmax.
      k_(store, name + ".k", d, d, /*with_bias=*/false),
      v_(store, name + ".v", d, d),
      o_(store, name + ".o", d, d),
      d_(d),
      heads_(heads) {
  if (heads == 0 || d % heads != 0) {
    throw Error(ErrorKind::kConfiguration, "hidden width " + std::to_string(d) +
                                               " is not divisible by " + std::to_string(heads) +
                                               " heads");
  }
}

Tensor MultiHeadAttention::Forward(const Tensor& query_in, const Tensor& memory, bool causal,
                                   std::vector<Tensor>* head_probs) const {
  const Tensor q = q_.Forward(query_in);
  const Tensor k = k_.Forward(memory);
  const Tensor v = v_.Forward(memory);
  const std::size_t tq = query_in.rows(), tk = memory.rows();
  const std::size_t dh = d_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Mask mask = Mask::AllTrue({tq, tk});
  if (causal) {
    for (std::size_t i = 0; i < tq; ++i)
      for (std::size_t j = i + 1; j < tk; ++j) mask.set(i, j, false);
  }

  std::vector<Tensor> heads;
  heads.reserve(heads_);
  for (std::size_t h = 0; h < heads_; ++h) {
    const Tensor qh = SliceCols(q, h * dh, (h + 1) * dh);
    const Tensor kh = SliceCols(k, h * dh, (h + 1) * dh);
    const Tensor vh = SliceCols(v, h * dh, (h + 1) * dh);
    const Tensor scores = Scale(MatMul(qh, Transpose(kh)), scale);
    const Tensor probs = Softmax(scores, 1, causal ? &mask : nullptr);
    if (head_probs) head_probs->push_back(Tensor::FromData(probs.shape(), probs.ToVector()));
    heads.push_back(MatMul(probs, vh));
  }
  return o_.Forward(heads.size() == 1 ? heads.front() : Concat(heads, 1));
}

FeedForward::FeedForward(ParamStore& store, const std::string& name, std::size_t d,
                         std::size_t hidden)
    : in(store, name + ".in", d, hidden), out(store, name + ".out", hidden, d) {}

EncoderLayer::EncoderLayer(ParamStore& store, const std::string& name, std::size_t d,
                           std::size_t heads, std::size_t ffn)
    : attn_(store, name + ".self_attn", d, heads),
      norm1_(store, name + ".norm1", d),
      norm2_(store, name + ".norm2", d),
      ffn_(store, name + ".ffn", d, ffn) {}

Tensor EncoderLayer::Forward(const Tensor& x, std::vector<Tensor>* head_probs) const {
  const Tensor h = norm1_.Forward(Add(x, attn_.Forward(x, x, false, head_probs)));
  return norm2_.Forward(Add(h, ffn_.Forward(h)));
}

DecoderLayer::DecoderLayer(ParamStore& store, const std::string& name, std::size_t d,
                           std::size_t heads, std::size_t ffn)
    : self_attn_(store, name + ".self_attn", d, heads),
      cross_attn_(store, name + ".cross_attn", d, heads),
      norm1_(store, name + ".norm1", d),
      norm2_(store, name + ".norm2", d),
      norm3_(store, name + ".norm3", d),
      ffn_(store, name + ".ffn", d, ffn) {}

Tensor DecoderLayer::Forward(const Tensor& x, const Tensor& memory, std::vector<Tensor>* self_probs,
                             std::vector<Tensor>* cross_probs) const {
  const Tensor h1 = norm1_.Forward(Add(x, self_attn_.Forward(x, x, true, self_probs)));
  const Tensor h2 = norm2_.Forward(Add(h1, cross_attn_.Forward(h1, memory, false, cross_probs)));
  return norm3_.Forward(Add(h2, ffn_.Forward(h2)));
}

}  // namespace syngen

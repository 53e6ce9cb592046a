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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "model.hpp"
#include "synth.hpp"
#include "test_util.hpp"

namespace syngen {
namespace {

using testing::MaxAbsDiff;
using testing::RandomTensor;

std::unique_ptr<SynGenModel> SmallModel(std::uint64_t seed, const std::vector<Sentence>& data) {
  ModelConfig c;
  c.d = 8;
  c.heads = 2;
  c.max_positions = 32;
  c.seed = seed;
  return std::make_unique<SynGenModel>(c, Vocabulary::Build(data));
}

TEST(IndexToTokenTest, Layout) {
  Sentence s;
  s.tokens = {"Food", "is", "always", "fresh", "and", "hot", "ready", "to", "eat", "!"};
  const auto v = Vocabulary::Build(std::span(&s, 1));
  std::vector<int> ids;
  for (const auto& t : s.tokens) ids.push_back(v.Id(t));
  const CandidateIndexSpace space(10);
  EXPECT_EQ(IndexToToken(6, ids, space), v.Id("hot"));
  EXPECT_EQ(IndexToToken(13, ids, space), v.PolarityId(Polarity::kPositive));
  EXPECT_EQ(IndexToToken(0, ids, space), Vocabulary::kBos);
  EXPECT_EQ(IndexToToken(11, ids, space), Vocabulary::kEos);
  for (int y = 0; y < space.total(); ++y) EXPECT_GE(IndexToToken(y, ids, space), 0);
}

TEST(BlendTest, ConvexEndpointsAndMidpoint) {
  std::mt19937_64 rng(1);
  const Tensor mlp = RandomTensor(rng, {4, 3});
  const Tensor emb = RandomTensor(rng, {4, 3});
  EXPECT_EQ(BlendEncoderStates(mlp, emb, 0.0).ToVector(), emb.ToVector());
  EXPECT_EQ(BlendEncoderStates(mlp, emb, 1.0).ToVector(), mlp.ToVector());
  // Identity MLP: the blend of H^e with itself through the MLP slot.
  const Tensor he = RandomTensor(rng, {4, 3});
  const auto mid = BlendEncoderStates(he, emb, 0.5).ToVector();
  for (std::size_t i = 0; i < mid.size(); ++i)
    EXPECT_NEAR(mid[i], (he.data()[i] + emb.data()[i]) / 2, 1e-15);
}

TEST(StepDistributionTest, ZeroHiddenIsUniform) {
  std::mt19937_64 rng(2);
  const Tensor blended = RandomTensor(rng, {7, 4});  // n = 5
  const Tensor polarity = RandomTensor(rng, {3, 4});
  const Tensor p = StepDistribution(blended, polarity, Tensor::Zeros({1, 4}));
  ASSERT_EQ(p.cols(), 10u);
  for (double v : p.ToVector()) EXPECT_NEAR(v, 0.1, 1e-15);
}

TEST(StepDistributionTest, SumsToOneAndSharpens) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 9;
    const Tensor blended = RandomTensor(rng, {n + 2, 4});
    const Tensor polarity = RandomTensor(rng, {3, 4});
    const Tensor h = RandomTensor(rng, {1, 4});
    const auto p = StepDistribution(blended, polarity, h).ToVector();
    const auto p2 = StepDistribution(blended, polarity, Scale(h, 2.0)).ToVector();
    ASSERT_EQ(p.size(), n + 5);
    double s = 0.0;
    for (double v : p) s += v;
    EXPECT_NEAR(s, 1.0, 1e-12);
    const auto a1 = std::max_element(p.begin(), p.end()) - p.begin();
    const auto a2 = std::max_element(p2.begin(), p2.end()) - p2.begin();
    EXPECT_EQ(a1, a2);
    EXPECT_GE(p2[a2], p[a1] - 1e-15);
  }
}

TEST(PointerDecoderTest, SingleStepShape) {
  const auto data = Synthesize(2, 1);
  const auto model = SmallModel(1, data);
  const auto enc_in = model->Prepare(data[0]);
  const auto enc = model->Encode(enc_in);
  const std::vector<int> prefix{0};
  const Tensor h = model->decoder().StepHidden(enc.fused, prefix, enc_in.word_ids());
  EXPECT_EQ(h.shape(), (Shape{1, 8}));
}

TEST(PointerDecoderTest, Causality) {
  const auto data = Synthesize(4, 2);
  const auto model = SmallModel(2, data);
  for (const auto& s : data) {
    const auto in = model->Prepare(s);
    const auto enc = model->Encode(in);
    const CandidateIndexSpace space(in.n);
    const auto targets = LinearizeTargets(s, SubtaskKind::kTriplet, space);
    const auto inputs = DecoderInputs(targets);
    const Tensor full = model->decoder().Hidden(enc.fused, inputs, in.word_ids());
    for (std::size_t t = 1; t <= inputs.size(); ++t) {
      const Tensor part =
          model->decoder().Hidden(enc.fused, std::span(inputs).first(t), in.word_ids());
      EXPECT_EQ(part.ToVector(), SliceRows(full, 0, t).ToVector());
    }
    // Changing a future input leaves earlier distributions untouched.
    auto altered = inputs;
    altered.back() = space.eos();
    const auto cand = model->Candidates(enc);
    const Tensor a = model->Distributions(enc, cand, in, inputs);
    const Tensor b = model->Distributions(enc, cand, in, altered);
    EXPECT_EQ(SliceRows(a, 0, inputs.size() - 1).ToVector(),
              SliceRows(b, 0, inputs.size() - 1).ToVector());
  }
}

TEST(PointerDecoderTest, AttentionRowsSumToOne) {
  const auto data = Synthesize(2, 3);
  const auto model = SmallModel(3, data);
  const auto in = model->Prepare(data[1]);
  const auto enc = model->Encode(in);
  const std::vector<int> prefix{0, 2, 2, 4};
  DecoderAttention attn;
  model->decoder().Hidden(enc.fused, prefix, in.word_ids(), &attn);
  ASSERT_EQ(attn.cross.size(), 2u);
  for (const auto* group : {&attn.self, &attn.cross}) {
    for (const auto& layer : *group) {
      for (const auto& head : layer) {
        EXPECT_EQ(head.rows(), prefix.size());
        for (std::size_t i = 0; i < head.rows(); ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < head.cols(); ++j) s += head.at(i, j);
          EXPECT_NEAR(s, 1.0, 1e-12);
        }
      }
    }
  }
  for (const auto& head : attn.self.front())
    for (std::size_t i = 0; i < head.rows(); ++i)
      for (std::size_t j = i + 1; j < head.cols(); ++j) EXPECT_EQ(head.at(i, j), 0.0);
}

TEST(PointerDecoderTest, CandidateBlendEndpoints) {
  const auto data = Synthesize(2, 4);
  auto model = SmallModel(4, data);
  const auto enc = model->Encode(model->Prepare(data[0]));
  model->decoder().set_blend_alpha(0.0);
  EXPECT_EQ(model->Candidates(enc).blended.ToVector(), enc.embedded.ToVector());
  model->decoder().set_blend_alpha(1.0);
  EXPECT_EQ(model->Candidates(enc).blended.ToVector(), model->decoder().Mlp(enc.fused).ToVector());
  const auto pol = model->Candidates(enc).polarity;
  const std::vector<int> ids{Vocabulary::kNeutral, Vocabulary::kPositive, Vocabulary::kNegative};
  EXPECT_EQ(pol.ToVector(), EmbeddingLookup(model->token_table(), ids).ToVector());
}

}  // namespace
}  // namespace syngen

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


#include "tensor.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "error.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

namespace syngen {
namespace {

using testing::MaxAbsDiff;
using testing::RandomTensor;

TEST(MatMulTest, IdentityAndSelection) {
  const Tensor eye = Tensor::Matrix({{1, 0}, {0, 1}});
  const Tensor m = Tensor::Matrix({{1, 2}, {3, 4}});
  EXPECT_EQ(MatMul(eye, m).ToVector(), m.ToVector());
  const Tensor r = MatMul(Tensor::Matrix({{1, 0}}), Tensor::Matrix({{5}, {7}}));
  EXPECT_EQ(r.shape(), (Shape{1, 1}));
  EXPECT_EQ(r.item(), 5.0);
}

TEST(MatMulTest, MatchesTripleLoop) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor a = RandomTensor(rng, {3, 4});
    const Tensor b = RandomTensor(rng, {4, 2});
    const Tensor c = MatMul(a, b);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < 4; ++k) s += a.at(i, k) * b.at(k, j);
        EXPECT_NEAR(c.at(i, j), s, 1e-12);
      }
    }
  }
}

TEST(MatMulTest, ShapeMismatchNamesShapes) {
  try {
    MatMul(Tensor::Zeros({2, 3}), Tensor::Zeros({2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimension);
    EXPECT_NE(std::string(e.what()).find("[2x3]"), std::string::npos) << e.what();
  }
}

TEST(SoftmaxTest, ClosedForms) {
  const auto u = Softmax(Tensor::Matrix({{1, 1, 1}}), 1).ToVector();
  for (double v : u) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  const auto l = Softmax(Tensor::Matrix({{0, std::log(2.0)}}), 1).ToVector();
  EXPECT_NEAR(l[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(l[1], 2.0 / 3.0, 1e-15);
}

TEST(SoftmaxTest, MaskExcludesEntry) {
  Mask mask = Mask::AllTrue({1, 3});
  mask.set(0, 2, false);
  const auto p = Softmax(Tensor::Matrix({{5, 5, 100}}), 1, &mask).ToVector();
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  EXPECT_EQ(p[2], 0.0);
}

TEST(SoftmaxTest, FullyMaskedSliceIsAnError) {
  Mask mask = Mask::AllTrue({2, 2});
  mask.set(1, 0, false);
  mask.set(1, 1, false);
  try {
    Softmax(Tensor::Matrix({{1, 2}, {3, 4}}), 1, &mask);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateMask);
  }
}

TEST(SoftmaxTest, SlicesSumToOne) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  std::uniform_real_distribution<double> scale(0.1, 50.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = dim(rng), c = dim(rng);
    const std::size_t axis = trial % 2;
    const Tensor p = Softmax(RandomTensor(rng, {r, c}, scale(rng)), axis);
    for (std::size_t i = 0; i < (axis == 1 ? r : c); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < (axis == 1 ? c : r); ++j)
        s += axis == 1 ? p.at(i, j) : p.at(j, i);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

TEST(ActivationTest, LeakyRelu) {
  const auto v = LeakyRelu(Tensor::Matrix({{-1, 3, 0}}), 0.2).ToVector();
  EXPECT_DOUBLE_EQ(v[0], -0.2);
  EXPECT_DOUBLE_EQ(v[1], 3.0);
  EXPECT_DOUBLE_EQ(v[2], 0.0);
}

TEST(ActivationTest, Sigmoid) {
  const auto v = Sigmoid(Tensor::Matrix({{0, 800, -800}})).ToVector();
  EXPECT_DOUBLE_EQ(v[0], 0.5);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
  EXPECT_EQ(v[2], 0.0);
  for (double x : v) EXPECT_TRUE(std::isfinite(x));
  Tensor x = Tensor::Scalar(0.0, true);
  Backward(Sum(Sigmoid(x)));
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.25);
}

TEST(BackwardTest, Quadratic) {
  Tensor x = Tensor::Matrix({{1, 2, 3}}, true);
  Backward(Sum(Hadamard(x, x)));
  EXPECT_EQ(std::vector<double>(x.grad().begin(), x.grad().end()),
            (std::vector<double>{2, 4, 6}));
}

TEST(BackwardTest, TwoPathsSum) {
  Tensor w = Tensor::Scalar(3.0, true);
  const Tensor y = Add(Scale(w, 2.0), Hadamard(w, w));  // 2w + w^2
  Backward(Sum(y));
  EXPECT_DOUBLE_EQ(w.grad()[0], 2.0 + 2.0 * 3.0);
}

TEST(BackwardTest, LeafGradientsAccumulateUntilCleared) {
  Tensor w = Tensor::Scalar(1.5, true);
  Backward(Scale(w, 2.0));
  Backward(Scale(w, 2.0));
  EXPECT_DOUBLE_EQ(w.grad()[0], 4.0);
  w.ZeroGrad();
  EXPECT_DOUBLE_EQ(w.grad()[0], 0.0);
}

TEST(BackwardTest, NonScalarIsRankError) {
  Tensor x = Tensor::Matrix({{1, 2}}, true);
  try {
    Backward(x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRank);
  }
}

TEST(BackwardTest, NoGradGuardRecordsNothing) {
  Tensor x = Tensor::Matrix({{1, 2}}, true);
  Tensor y;
  {
    NoGradGuard guard;
    y = Sum(Hadamard(x, x));
  }
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(GradEnabled());
}

TEST(IdentityTest, AlgebraicIdentities) {
  std::mt19937_64 rng(3);
  const Tensor a = RandomTensor(rng, {3, 3});
  const Tensor z = Tensor::Zeros({3, 3});
  for (double v : Hadamard(a, z).ToVector()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(Add(a, z).ToVector(), a.ToVector());
  const Tensor eye = Tensor::FromData({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  EXPECT_EQ(MatMul(a, eye).ToVector(), a.ToVector());
}

TEST(LayerNormTest, NormalizesRows) {
  const Tensor y = LayerNorm(Tensor::Matrix({{1, 2, 3, 4}}), Tensor::Full({1, 4}, 1.0),
                             Tensor::Zeros({1, 4}));
  double mean = 0.0, var = 0.0;
  for (double v : y.ToVector()) mean += v / 4;
  for (double v : y.ToVector()) var += (v - mean) * (v - mean) / 4;
  EXPECT_NEAR(mean, 0.0, 1e-14);
  EXPECT_NEAR(var, 1.25 / (1.25 + 1e-5), 1e-12);
}

TEST(GeluTest, ErfForm) {
  const auto v = Gelu(Tensor::Matrix({{-1, 0, 2}})).ToVector();
  for (int i = 0; i < 3; ++i) {
    const double x = std::vector<double>{-1, 0, 2}[i];
    EXPECT_NEAR(v[i], 0.5 * x * (1 + std::erf(x / std::sqrt(2.0))), 1e-15);
  }
}

// Random small graphs built from every primitive, checked against central
// differences.
TEST(CompositeGradientTest, RandomGraphsMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + trial % 3, k = 2 + (trial / 3) % 3;
    Tensor a = RandomTensor(rng, {m, k}, 0.8, true);
    Tensor b = RandomTensor(rng, {k, m}, 0.8, true);
    Tensor g = RandomTensor(rng, {1, m}, 0.8, true);
    Tensor col = RandomTensor(rng, {m, 1}, 0.8, true);
    const int variant = trial % 5;
    auto forward = [&]() {
      Tensor h = MatMul(a, b);  // m×m
      switch (variant) {
        case 0: h = Softmax(h, 1); break;
        case 1: h = LayerNorm(h, g, Scale(g, 0.5)); break;
        case 2: h = Sigmoid(AddRowBroadcast(h, g)); break;
        case 3: h = LeakyRelu(OuterSum(col, g), 0.2); h = Hadamard(h, MatMul(a, b)); break;
        default: h = Gelu(ScaleRows(Sigmoid(col), Transpose(h))); break;
      }
      const Tensor top = SliceRows(h, 0, 1);
      const Tensor cat = Concat({h, top}, 0);
      const Tensor p = Softmax(SliceCols(cat, 0, m), 1);
      return Add(Mean(Log(p)), Sum(Hadamard(h, h)));
    };
    const auto r = FiniteDiffCheck(forward, {{"a", a}, {"b", b}, {"g", g}, {"col", col}});
    EXPECT_LT(r.max_rel_error, 1e-4) << "variant " << variant << " worst " << r.worst_param;
  }
}

TEST(CompositeGradientTest, LookupAndGather) {
  std::mt19937_64 rng(5);
  Tensor table = RandomTensor(rng, {6, 3}, 1.0, true);
  const std::vector<int> ids{4, 1, 4, 0};
  const std::vector<int> cols{2, 0, 1, 2};
  auto forward = [&]() {
    const Tensor e = EmbeddingLookup(table, ids);
    return Sum(Log(GatherCols(Softmax(e, 1), cols)));
  };
  EXPECT_LT(FiniteDiffCheck(forward, {{"table", table}}).max_rel_error, 1e-6);
}

}  // namespace
}  // namespace syngen

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

// Dense f64 tensors with a recorded tape for reverse-mode differentiation.
//
// A Tensor is a cheap handle onto a shared node. Forward ops build new nodes
// that remember their parents and a backward rule; backward() walks the tape
// in reverse topological order and accumulates into every reachable node that
// requires a gradient. Leaf gradients accumulate across calls until cleared.

#ifndef SYNGEN_TENSOR_HPP_
#define SYNGEN_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace syngen {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until something flows into it
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  void EnsureGrad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(const Shape& shape, bool requires_grad = false);
  static Tensor Full(const Shape& shape, double value, bool requires_grad = false);
  static Tensor FromData(const Shape& shape, std::vector<double> data,
                         bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  // Row vector or matrix literal, mostly for tests.
  static Tensor Matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  // Rank-2 accessors; a rank-1 tensor is treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const;
  // Direct write access. Only meant for leaves (parameters, optimizer,
  // finite-difference probes); writing into an interior node silently
  // desynchronizes it from its tape.
  std::span<double> mutable_data();
  double at(std::size_t r, std::size_t c) const;
  double item() const;

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void ZeroGrad();
  void ClearGrad();

  const char* op() const;
  std::vector<double> ToVector() const;

  // Same storage identity.
  bool SameAs(const Tensor& other) const { return node_ == other.node_; }

  // Internal; used by op implementations.
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// Boolean keep-mask aligned element-wise with a tensor: true = participates.
struct Mask {
  Shape shape;
  std::vector<std::uint8_t> keep;

  static Mask AllTrue(const Shape& shape);
  bool at(std::size_t r, std::size_t c) const { return keep[r * shape[1] + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { keep[r * shape[1] + c] = v ? 1 : 0; }
};

// Thread-local switch for recording. While disabled, ops produce plain
// leaves with no parents, so concurrent read-only forwards never share tape.
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Test hook: when set, the GELU backward rule is deliberately scaled by 1.1.
// Exists only so gradient checking has a negative control.
void SetBreakGradient(bool broken);
bool BreakGradient();

// ---------------------------------------------------------------------------
// Ops. All shapes are validated; mismatches raise ErrorKind::kDimension with
// both shapes named.

Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& t);
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& t, double factor);
Tensor Hadamard(const Tensor& a, const Tensor& b);
// m×n + 1×n, broadcasting the row over every row of `a`.
Tensor AddRowBroadcast(const Tensor& a, const Tensor& row);
// m×1 column times m×n matrix: row i of `m` scaled by column[i].
Tensor ScaleRows(const Tensor& column, const Tensor& m);
// m×1 column plus 1×n row -> m×n with out[i][j] = column[i] + row[j].
Tensor OuterSum(const Tensor& column, const Tensor& row);
Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor SliceRows(const Tensor& t, std::size_t begin, std::size_t end);
Tensor SliceCols(const Tensor& t, std::size_t begin, std::size_t end);
Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids);
// out[i] = t[i][cols[i]]; shape m×1.
Tensor GatherCols(const Tensor& t, std::span<const int> cols);

Tensor Softmax(const Tensor& t, std::size_t axis, const Mask* mask = nullptr);
Tensor LeakyRelu(const Tensor& t, double slope);
Tensor Sigmoid(const Tensor& t);
Tensor Gelu(const Tensor& t);
Tensor Log(const Tensor& t);
// Row-wise normalization over the last axis with affine gain/bias (1×n each).
Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                 double eps = 1e-5);

Tensor Sum(const Tensor& t);
Tensor Mean(const Tensor& t);

// Reverse sweep from a scalar. Raises ErrorKind::kRank on non-scalars.
void Backward(const Tensor& loss);

}  // namespace syngen

#endif  // SYNGEN_TENSOR_HPP_

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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "error.hpp"

namespace syngen {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

thread_local bool g_grad_enabled = true;
std::atomic<bool> g_break_gradient{false};

using NodePtr = std::shared_ptr<detail::Node>;

[[noreturn]] void DimError(const char* op, const Shape& a, const Shape& b) {
  throw Error(ErrorKind::kDimension, std::string(op) + ": incompatible shapes " +
                                         ShapeString(a) + " and " + ShapeString(b));
}

[[noreturn]] void DimError(const char* op, const Shape& a) {
  throw Error(ErrorKind::kDimension,
              std::string(op) + ": unsupported shape " + ShapeString(a));
}

// Rows/cols of a rank-1 or rank-2 view.
std::pair<std::size_t, std::size_t> View2d(const char* op, const Shape& s) {
  if (s.size() == 2) return {s[0], s[1]};
  if (s.size() == 1) return {1, s[0]};
  DimError(op, s);
}

NodePtr NewNode(Shape shape, std::vector<double> data, bool requires_grad) {
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return node;
}

// Builds the output node and wires its tape entry only when needed.
Tensor Record(Shape shape, std::vector<double> data, const char* op,
              std::vector<NodePtr> parents, std::function<void(detail::Node&)> backward) {
  bool track = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) track = track || p->requires_grad;
  }
  auto node = NewNode(std::move(shape), std::move(data), track);
  node->op = op;
  if (track) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

// Accumulates `g` into parent `p` if it is tracked.
inline bool Wants(const NodePtr& p) { return p->requires_grad; }

}  // namespace

bool GradEnabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

void SetBreakGradient(bool broken) { g_break_gradient = broken; }
bool BreakGradient() { return g_break_gradient; }

// ---------------------------------------------------------------------------
// Tensor

Tensor Tensor::Zeros(const Shape& shape, bool requires_grad) {
  return Full(shape, 0.0, requires_grad);
}

Tensor Tensor::Full(const Shape& shape, double value, bool requires_grad) {
  return Tensor(NewNode(shape, std::vector<double>(NumElements(shape), value), requires_grad));
}

Tensor Tensor::FromData(const Shape& shape, std::vector<double> data, bool requires_grad) {
  if (NumElements(shape) != data.size()) {
    throw Error(ErrorKind::kDimension, "FromData: shape " + ShapeString(shape) + " needs " +
                                           std::to_string(NumElements(shape)) +
                                           " values, got " + std::to_string(data.size()));
  }
  return Tensor(NewNode(shape, std::move(data), requires_grad));
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return Tensor(NewNode({}, {value}, requires_grad));
}

Tensor Tensor::Matrix(std::initializer_list<std::initializer_list<double>> rows,
                      bool requires_grad) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorKind::kDimension, "Matrix: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return FromData({r, c}, std::move(data), requires_grad);
}

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::numel() const { return node_->data.size(); }

std::size_t Tensor::rows() const { return View2d("rows", shape()).first; }
std::size_t Tensor::cols() const { return View2d("cols", shape()).second; }

std::span<const double> Tensor::data() const { return node_->data; }
std::span<double> Tensor::mutable_data() { return node_->data; }

double Tensor::at(std::size_t r, std::size_t c) const { return node_->data[r * cols() + c]; }

double Tensor::item() const {
  if (numel() != 1) {
    throw Error(ErrorKind::kRank, "item() on tensor of shape " + ShapeString(shape()));
  }
  return node_->data[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }
bool Tensor::has_grad() const { return !node_->grad.empty(); }
std::span<const double> Tensor::grad() const { return node_->grad; }
std::span<double> Tensor::mutable_grad() {
  node_->EnsureGrad();
  return node_->grad;
}
void Tensor::ZeroGrad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}
void Tensor::ClearGrad() { node_->grad.clear(); }
const char* Tensor::op() const { return node_->op; }
std::vector<double> Tensor::ToVector() const { return node_->data; }

Mask Mask::AllTrue(const Shape& shape) {
  return Mask{shape, std::vector<std::uint8_t>(NumElements(shape), 1)};
}

// ---------------------------------------------------------------------------
// Linear algebra

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    DimError("matmul", a.shape(), b.shape());
  }
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(m * n, 0.0);
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * B[p * n + j];
    }
  }
  return Record({m, n}, std::move(out), "matmul", {a.node(), b.node()},
                [m, k, n](detail::Node& self) {
                  auto& pa = self.parents[0];
                  auto& pb = self.parents[1];
                  const auto& G = self.grad;
                  if (Wants(pa)) {
                    pa->EnsureGrad();
                    // dA = G · Bᵀ
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t p = 0; p < k; ++p) {
                        double s = 0.0;
                        for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * pb->data[p * n + j];
                        pa->grad[i * k + p] += s;
                      }
                  }
                  if (Wants(pb)) {
                    pb->EnsureGrad();
                    // dB = Aᵀ · G
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t p = 0; p < k; ++p) {
                        const double av = pa->data[i * k + p];
                        if (av == 0.0) continue;
                        for (std::size_t j = 0; j < n; ++j) pb->grad[p * n + j] += av * G[i * n + j];
                      }
                  }
                });
}

Tensor Transpose(const Tensor& t) {
  if (t.rank() != 2) DimError("transpose", t.shape());
  const std::size_t m = t.shape()[0], n = t.shape()[1];
  std::vector<double> out(m * n);
  auto D = t.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = D[i * n + j];
  return Record({n, m}, std::move(out), "transpose", {t.node()}, [m, n](detail::Node& self) {
    auto& p = self.parents[0];
    p->EnsureGrad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) p->grad[i * n + j] += self.grad[j * m + i];
  });
}

// ---------------------------------------------------------------------------
// Element-wise

namespace {

template <typename Fwd>
Tensor Binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, double da_sign,
              double db_sign) {
  if (a.shape() != b.shape()) DimError(op, a.shape(), b.shape());
  std::vector<double> out(a.numel());
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(A[i], B[i]);
  return Record(a.shape(), std::move(out), op, {a.node(), b.node()},
                [da_sign, db_sign](detail::Node& self) {
                  for (int which = 0; which < 2; ++which) {
                    auto& p = self.parents[which];
                    if (!Wants(p)) continue;
                    p->EnsureGrad();
                    const double s = which == 0 ? da_sign : db_sign;
                    for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += s * self.grad[i];
                  }
                });
}

// Unary op with derivative expressed from (input, output).
template <typename Fwd, typename Deriv>
Tensor Unary(const char* op, const Tensor& t, Fwd fwd, Deriv deriv) {
  std::vector<double> out(t.numel());
  auto D = t.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(D[i]);
  return Record(t.shape(), std::move(out), op, {t.node()}, [deriv](detail::Node& self) {
    auto& p = self.parents[0];
    p->EnsureGrad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      p->grad[i] += self.grad[i] * deriv(p->data[i], self.data[i]);
  });
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  return Binary("add", a, b, [](double x, double y) { return x + y; }, 1.0, 1.0);
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return Binary("sub", a, b, [](double x, double y) { return x - y; }, 1.0, -1.0);
}

Tensor Scale(const Tensor& t, double factor) {
  return Unary("scale", t, [factor](double x) { return factor * x; },
               [factor](double, double) { return factor; });
}

Tensor Hadamard(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) DimError("hadamard", a.shape(), b.shape());
  std::vector<double> out(a.numel());
  auto A = a.data();
  auto B = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * B[i];
  return Record(a.shape(), std::move(out), "hadamard", {a.node(), b.node()},
                [](detail::Node& self) {
                  auto& pa = self.parents[0];
                  auto& pb = self.parents[1];
                  if (Wants(pa)) {
                    pa->EnsureGrad();
                    for (std::size_t i = 0; i < self.grad.size(); ++i)
                      pa->grad[i] += self.grad[i] * pb->data[i];
                  }
                  if (Wants(pb)) {
                    pb->EnsureGrad();
                    for (std::size_t i = 0; i < self.grad.size(); ++i)
                      pb->grad[i] += self.grad[i] * pa->data[i];
                  }
                });
}

Tensor AddRowBroadcast(const Tensor& a, const Tensor& row) {
  const auto [m, n] = View2d("add_row_broadcast", a.shape());
  const auto [rr, rc] = View2d("add_row_broadcast", row.shape());
  if (a.rank() != 2 || rr != 1 || rc != n) DimError("add_row_broadcast", a.shape(), row.shape());
  std::vector<double> out(a.data().begin(), a.data().end());
  auto R = row.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += R[j];
  return Record(a.shape(), std::move(out), "add_row_broadcast", {a.node(), row.node()},
                [m, n](detail::Node& self) {
                  auto& pa = self.parents[0];
                  auto& pr = self.parents[1];
                  if (Wants(pa)) {
                    pa->EnsureGrad();
                    for (std::size_t i = 0; i < m * n; ++i) pa->grad[i] += self.grad[i];
                  }
                  if (Wants(pr)) {
                    pr->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j) pr->grad[j] += self.grad[i * n + j];
                  }
                });
}

Tensor ScaleRows(const Tensor& column, const Tensor& mat) {
  if (mat.rank() != 2 || column.rank() != 2 || column.shape()[1] != 1 ||
      column.shape()[0] != mat.shape()[0]) {
    DimError("scale_rows", column.shape(), mat.shape());
  }
  const std::size_t m = mat.shape()[0], n = mat.shape()[1];
  std::vector<double> out(m * n);
  auto C = column.data();
  auto M = mat.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = C[i] * M[i * n + j];
  return Record({m, n}, std::move(out), "scale_rows", {column.node(), mat.node()},
                [m, n](detail::Node& self) {
                  auto& pc = self.parents[0];
                  auto& pm = self.parents[1];
                  if (Wants(pc)) {
                    pc->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i) {
                      double s = 0.0;
                      for (std::size_t j = 0; j < n; ++j) s += self.grad[i * n + j] * pm->data[i * n + j];
                      pc->grad[i] += s;
                    }
                  }
                  if (Wants(pm)) {
                    pm->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j)
                        pm->grad[i * n + j] += self.grad[i * n + j] * pc->data[i];
                  }
                });
}

Tensor OuterSum(const Tensor& column, const Tensor& row) {
  if (column.rank() != 2 || row.rank() != 2 || column.shape()[1] != 1 || row.shape()[0] != 1) {
    DimError("outer_sum", column.shape(), row.shape());
  }
  const std::size_t m = column.shape()[0], n = row.shape()[1];
  std::vector<double> out(m * n);
  auto C = column.data();
  auto R = row.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = C[i] + R[j];
  return Record({m, n}, std::move(out), "outer_sum", {column.node(), row.node()},
                [m, n](detail::Node& self) {
                  auto& pc = self.parents[0];
                  auto& pr = self.parents[1];
                  if (Wants(pc)) {
                    pc->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j) pc->grad[i] += self.grad[i * n + j];
                  }
                  if (Wants(pr)) {
                    pr->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j) pr->grad[j] += self.grad[i * n + j];
                  }
                });
}

// ---------------------------------------------------------------------------
// Structural

Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw Error(ErrorKind::kDimension, "concat: no inputs");
  if (axis > 1) throw Error(ErrorKind::kDimension, "concat: axis must be 0 or 1");
  for (const auto& p : parts) {
    if (p.rank() != 2) DimError("concat", p.shape());
  }
  const Shape& first = parts.front().shape();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.shape()[1 - axis] != first[1 - axis]) DimError("concat", first, p.shape());
    total += p.shape()[axis];
  }
  Shape shape = first;
  shape[axis] = total;
  const std::size_t out_cols = shape[1];
  std::vector<double> out(NumElements(shape));
  std::vector<NodePtr> parents;
  std::vector<std::size_t> offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t r = p.shape()[0], c = p.shape()[1];
    auto D = p.data();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        const std::size_t oi = axis == 0 ? off + i : i;
        const std::size_t oj = axis == 1 ? off + j : j;
        out[oi * out_cols + oj] = D[i * c + j];
      }
    parents.push_back(p.node());
    offsets.push_back(off);
    off += p.shape()[axis];
  }
  return Record(std::move(shape), std::move(out), "concat", std::move(parents),
                [axis, offsets, out_cols](detail::Node& self) {
                  for (std::size_t k = 0; k < self.parents.size(); ++k) {
                    auto& p = self.parents[k];
                    if (!Wants(p)) continue;
                    p->EnsureGrad();
                    const std::size_t r = p->shape[0], c = p->shape[1];
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < c; ++j) {
                        const std::size_t oi = axis == 0 ? offsets[k] + i : i;
                        const std::size_t oj = axis == 1 ? offsets[k] + j : j;
                        p->grad[i * c + j] += self.grad[oi * out_cols + oj];
                      }
                  }
                });
}

Tensor SliceRows(const Tensor& t, std::size_t begin, std::size_t end) {
  if (t.rank() != 2 || begin > end || end > t.shape()[0]) {
    throw Error(ErrorKind::kDimension, "slice_rows: [" + std::to_string(begin) + ", " +
                                           std::to_string(end) + ") out of " +
                                           ShapeString(t.shape()));
  }
  const std::size_t n = t.shape()[1];
  std::vector<double> out(t.data().begin() + begin * n, t.data().begin() + end * n);
  return Record({end - begin, n}, std::move(out), "slice_rows", {t.node()},
                [begin, n](detail::Node& self) {
                  auto& p = self.parents[0];
                  p->EnsureGrad();
                  for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[begin * n + i] += self.grad[i];
                });
}

Tensor SliceCols(const Tensor& t, std::size_t begin, std::size_t end) {
  if (t.rank() != 2 || begin > end || end > t.shape()[1]) {
    throw Error(ErrorKind::kDimension, "slice_cols: [" + std::to_string(begin) + ", " +
                                           std::to_string(end) + ") out of " +
                                           ShapeString(t.shape()));
  }
  const std::size_t m = t.shape()[0], n = t.shape()[1], w = end - begin;
  std::vector<double> out(m * w);
  auto D = t.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = D[i * n + begin + j];
  return Record({m, w}, std::move(out), "slice_cols", {t.node()},
                [m, n, w, begin](detail::Node& self) {
                  auto& p = self.parents[0];
                  p->EnsureGrad();
                  for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < w; ++j) p->grad[i * n + begin + j] += self.grad[i * w + j];
                });
}

Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids) {
  if (table.rank() != 2) DimError("embedding_lookup", table.shape());
  const std::size_t v = table.shape()[0], d = table.shape()[1];
  std::vector<int> idx(ids.begin(), ids.end());
  std::vector<double> out(idx.size() * d);
  auto D = table.data();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= v) {
      throw Error(ErrorKind::kRange, "embedding_lookup: id " + std::to_string(idx[i]) +
                                         " outside table of " + std::to_string(v) + " rows");
    }
    std::copy_n(D.begin() + idx[i] * d, d, out.begin() + i * d);
  }
  return Record({idx.size(), d}, std::move(out), "embedding_lookup", {table.node()},
                [idx, d](detail::Node& self) {
                  auto& p = self.parents[0];
                  p->EnsureGrad();
                  for (std::size_t i = 0; i < idx.size(); ++i)
                    for (std::size_t j = 0; j < d; ++j) p->grad[idx[i] * d + j] += self.grad[i * d + j];
                });
}

Tensor GatherCols(const Tensor& t, std::span<const int> cols) {
  if (t.rank() != 2 || cols.size() != t.shape()[0]) {
    throw Error(ErrorKind::kDimension, "gather_cols: " + std::to_string(cols.size()) +
                                           " indices for " + ShapeString(t.shape()));
  }
  const std::size_t m = t.shape()[0], n = t.shape()[1];
  std::vector<int> idx(cols.begin(), cols.end());
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= n) {
      throw Error(ErrorKind::kRange, "gather_cols: column " + std::to_string(idx[i]) +
                                         " outside " + ShapeString(t.shape()));
    }
    out[i] = t.data()[i * n + idx[i]];
  }
  return Record({m, 1}, std::move(out), "gather_cols", {t.node()}, [idx, n](detail::Node& self) {
    auto& p = self.parents[0];
    p->EnsureGrad();
    for (std::size_t i = 0; i < idx.size(); ++i) p->grad[i * n + idx[i]] += self.grad[i];
  });
}

// ---------------------------------------------------------------------------
// Nonlinearities

Tensor Softmax(const Tensor& t, std::size_t axis, const Mask* mask) {
  auto [rows, cols] = View2d("softmax", t.shape());
  // A rank-1 tensor only has axis 0, which runs along its columns.
  bool along_rows = t.rank() == 2 ? axis == 1 : axis == 0;
  if ((t.rank() == 2 && axis > 1) || (t.rank() == 1 && axis != 0)) {
    throw Error(ErrorKind::kDimension, "softmax: axis " + std::to_string(axis) +
                                           " invalid for " + ShapeString(t.shape()));
  }
  if (mask != nullptr && NumElements(mask->shape) != t.numel()) {
    DimError("softmax mask", t.shape(), mask->shape);
  }
  // Slices are either rows (stride 1) or columns (stride cols).
  const std::size_t slices = along_rows ? rows : cols;
  const std::size_t len = along_rows ? cols : rows;
  const std::size_t outer_stride = along_rows ? cols : 1;
  const std::size_t inner_stride = along_rows ? 1 : cols;
  auto D = t.data();
  std::vector<double> out(t.numel(), 0.0);
  for (std::size_t s = 0; s < slices; ++s) {
    const std::size_t base = s * outer_stride;
    double mx = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t i = base + k * inner_stride;
      if (mask && !mask->keep[i]) continue;
      any = true;
      mx = std::max(mx, D[i]);
    }
    if (!any) {
      throw Error(ErrorKind::kDegenerateMask,
                  "softmax: slice " + std::to_string(s) + " of " + ShapeString(t.shape()) +
                      " has every entry masked");
    }
    double z = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t i = base + k * inner_stride;
      if (mask && !mask->keep[i]) continue;
      out[i] = std::exp(D[i] - mx);
      z += out[i];
    }
    for (std::size_t k = 0; k < len; ++k) out[base + k * inner_stride] /= z;
  }
  return Record(t.shape(), std::move(out), "softmax", {t.node()},
                [slices, len, outer_stride, inner_stride](detail::Node& self) {
                  auto& p = self.parents[0];
                  p->EnsureGrad();
                  const auto& y = self.data;
                  const auto& g = self.grad;
                  for (std::size_t s = 0; s < slices; ++s) {
                    const std::size_t base = s * outer_stride;
                    double dot = 0.0;
                    for (std::size_t k = 0; k < len; ++k) {
                      const std::size_t i = base + k * inner_stride;
                      dot += y[i] * g[i];
                    }
                    for (std::size_t k = 0; k < len; ++k) {
                      const std::size_t i = base + k * inner_stride;
                      p->grad[i] += y[i] * (g[i] - dot);
                    }
                  }
                });
}

Tensor LeakyRelu(const Tensor& t, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw Error(ErrorKind::kPrecondition, "leaky_relu: slope must lie in (0,1)");
  }
  return Unary(
      "leaky_relu", t, [slope](double x) { return x >= 0.0 ? x : slope * x; },
      [slope](double x, double) { return x >= 0.0 ? 1.0 : slope; });
}

Tensor Sigmoid(const Tensor& t) {
  return Unary(
      "sigmoid", t,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Gelu(const Tensor& t) {
  const double factor = BreakGradient() ? 1.1 : 1.0;
  return Unary(
      "gelu", t, [](double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); },
      [factor](double x, double) {
        const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return factor * (cdf + x * pdf);
      });
}

Tensor Log(const Tensor& t) {
  return Unary("log", t, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.rank() != 2) DimError("layer_norm", x.shape());
  const std::size_t m = x.shape()[0], n = x.shape()[1];
  if (gain.numel() != n) DimError("layer_norm gain", x.shape(), gain.shape());
  if (bias.numel() != n) DimError("layer_norm bias", x.shape(), bias.shape());
  auto X = x.data();
  auto G = gain.data();
  auto B = bias.data();
  std::vector<double> out(m * n), xhat(m * n), inv_std(m);
  for (std::size_t i = 0; i < m; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += X[i * n + j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double c = X[i * n + j] - mu;
      var += c * c;
    }
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (X[i * n + j] - mu) * inv_std[i];
      out[i * n + j] = xhat[i * n + j] * G[j] + B[j];
    }
  }
  return Record({m, n}, std::move(out), "layer_norm", {x.node(), gain.node(), bias.node()},
                [m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](detail::Node& self) {
                  auto& px = self.parents[0];
                  auto& pg = self.parents[1];
                  auto& pb = self.parents[2];
                  const auto& g = self.grad;
                  if (Wants(pg)) {
                    pg->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j) pg->grad[j] += g[i * n + j] * xhat[i * n + j];
                  }
                  if (Wants(pb)) {
                    pb->EnsureGrad();
                    for (std::size_t i = 0; i < m; ++i)
                      for (std::size_t j = 0; j < n; ++j) pb->grad[j] += g[i * n + j];
                  }
                  if (Wants(px)) {
                    px->EnsureGrad();
                    const double inv_n = 1.0 / static_cast<double>(n);
                    for (std::size_t i = 0; i < m; ++i) {
                      double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
                      for (std::size_t j = 0; j < n; ++j) {
                        const double dxh = g[i * n + j] * pg->data[j];
                        mean_dxhat += dxh;
                        mean_dxhat_xhat += dxh * xhat[i * n + j];
                      }
                      mean_dxhat *= inv_n;
                      mean_dxhat_xhat *= inv_n;
                      for (std::size_t j = 0; j < n; ++j) {
                        const double dxh = g[i * n + j] * pg->data[j];
                        px->grad[i * n + j] +=
                            inv_std[i] * (dxh - mean_dxhat - xhat[i * n + j] * mean_dxhat_xhat);
                      }
                    }
                  }
                });
}

// ---------------------------------------------------------------------------
// Reductions

Tensor Sum(const Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return Record({}, {s}, "sum", {t.node()}, [](detail::Node& self) {
    auto& p = self.parents[0];
    p->EnsureGrad();
    for (double& g : p->grad) g += self.grad[0];
  });
}

Tensor Mean(const Tensor& t) {
  if (t.numel() == 0) throw Error(ErrorKind::kEmptyInput, "mean of empty tensor");
  const double inv = 1.0 / static_cast<double>(t.numel());
  double s = 0.0;
  for (double v : t.data()) s += v;
  return Record({}, {s * inv}, "mean", {t.node()}, [inv](detail::Node& self) {
    auto& p = self.parents[0];
    p->EnsureGrad();
    for (double& g : p->grad) g += self.grad[0] * inv;
  });
}

// ---------------------------------------------------------------------------

void Backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw Error(ErrorKind::kRank, "backward requires a scalar loss, got shape " +
                                      (loss.defined() ? ShapeString(loss.shape()) : "<null>"));
  }
  const NodePtr& root = loss.node();
  if (!root->requires_grad) return;

  // Post-order DFS gives parents before children; walk it backwards.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  // Interior gradients are per-sweep; leaves accumulate.
  for (detail::Node* node : order) {
    if (node->backward) node->grad.assign(node->data.size(), 0.0);
  }
  root->EnsureGrad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    if (node->backward) node->backward(*node);
  }
  for (detail::Node* node : order) {
    if (node->backward) {
      node->grad.clear();
      node->grad.shrink_to_fit();
    }
  }
}

}  // namespace syngen

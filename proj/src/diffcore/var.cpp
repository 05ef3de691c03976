/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "diffcore/var.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace gcgat::diff {

std::string ShapeString(const std::vector<std::size_t>& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

namespace {

std::atomic<std::uint64_t> next_node_id{1};

using BackwardFn = std::function<void(Node&)>;

Var MakeNode(Tensor value, std::vector<std::shared_ptr<Node>> parents,
             BackwardFn backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->id = next_node_id.fetch_add(1, std::memory_order_relaxed);
  node->requires_grad = std::any_of(
      parents.begin(), parents.end(),
      [](const std::shared_ptr<Node>& p) { return p->requires_grad; });
  if (node->requires_grad) {
    node->parents = std::move(parents);
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

void CheckShape(bool ok, const char* op, const Var& a, const Var& b) {
  if (!ok) {
    Fail(ErrorCode::kShapeMismatch,
         std::string(op) + ": incompatible shapes " +
             ShapeString(a.value().shape()) + " and " +
             ShapeString(b.value().shape()));
  }
}

// C[m,n] += A[m,k] B[k,n]
void GemmNN(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c_row = c + i * n;
    const double* a_row = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double a_ip = a_row[p];
      if (a_ip == 0.0) continue;
      const double* b_row = b + p * n;
      for (std::size_t j = 0; j < n; ++j) c_row[j] += a_ip * b_row[j];
    }
  }
}

// C[m,n] += A[m,k] B[n,k]^T
void GemmNT(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a_row = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b_row = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a_row[p] * b_row[p];
      c[i * n + j] += acc;
    }
  }
}

// C[k,n] += A[m,k]^T B[m,n]
void GemmTN(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a_row = a + i * k;
    const double* b_row = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double a_ip = a_row[p];
      if (a_ip == 0.0) continue;
      double* c_row = c + p * n;
      for (std::size_t j = 0; j < n; ++j) c_row[j] += a_ip * b_row[j];
    }
  }
}

template <typename Forward, typename Derivative>
Var Unary(const Var& a, Forward forward, Derivative derivative) {
  Tensor out(a.value().shape());
  const auto in = a.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = forward(in[i]);
  return MakeNode(std::move(out), {a.node_ptr()}, [derivative](Node& self) {
    Node& p = *self.parents[0];
    auto& g = p.EnsureGrad();
    const auto x = p.value.values();
    const auto y = self.value.values();
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] += self.grad[i] * derivative(x[i], y[i]);
  });
}

double SigmoidScalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double Var::item() const {
  Require(size() == 1, ErrorCode::kShapeMismatch, "item() on non-scalar var");
  return node_->value[0];
}

std::vector<double> Var::grad() const {
  if (node_->grad.size() == node_->value.size()) return node_->grad;
  return std::vector<double>(node_->value.size(), 0.0);
}

Var Constant(Tensor value) {
  Require(value.rank() == 2, ErrorCode::kShapeMismatch,
          "vars are rank-2; got shape " + ShapeString(value.shape()));
  return MakeNode(std::move(value), {}, {});
}

Var Leaf(Tensor value, bool requires_grad) {
  Var v = Constant(std::move(value));
  v.node().requires_grad = requires_grad;
  return v;
}

Var Zeros(std::size_t rows, std::size_t cols) {
  return Constant(Tensor::Matrix(rows, cols));
}

void Backward(const Var& root) {
  Require(root.size() == 1, ErrorCode::kShapeMismatch,
          "Backward() needs a scalar root");
  if (!root.requires_grad()) return;

  std::vector<Node*> order;
  std::unordered_set<const Node*> seen;
  std::vector<Node*> stack{&root.node()};
  seen.insert(&root.node());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents) {
      if (p->requires_grad && seen.insert(p.get()).second) stack.push_back(p.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const Node* x, const Node* y) { return x->id > y->id; });

  root.node().EnsureGrad()[0] += 1.0;
  for (Node* n : order) {
    if (n->backward && n->grad.size() == n->value.size()) n->backward(*n);
  }
}

// ---------------------------------------------------------------------------

Var MatMul(const Var& a, const Var& b) {
  CheckShape(a.cols() == b.rows(), "MatMul", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = Tensor::Matrix(m, n);
  GemmNN(a.value().raw(), b.value().raw(), out.raw(), m, k, n);
  return MakeNode(std::move(out), {a.node_ptr(), b.node_ptr()},
                  [m, k, n](Node& self) {
                    Node& pa = *self.parents[0];
                    Node& pb = *self.parents[1];
                    if (pa.requires_grad)
                      GemmNT(self.grad.data(), pb.value.raw(),
                             pa.EnsureGrad().data(), m, n, k);
                    if (pb.requires_grad)
                      GemmTN(pa.value.raw(), self.grad.data(),
                             pb.EnsureGrad().data(), m, k, n);
                  });
}

Var MatMulTransposed(const Var& a, const Var& b) {
  CheckShape(a.cols() == b.cols(), "MatMulTransposed", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor out = Tensor::Matrix(m, n);
  GemmNT(a.value().raw(), b.value().raw(), out.raw(), m, k, n);
  return MakeNode(std::move(out), {a.node_ptr(), b.node_ptr()},
                  [m, k, n](Node& self) {
                    Node& pa = *self.parents[0];
                    Node& pb = *self.parents[1];
                    // dA = dC B, dB = dC^T A
                    if (pa.requires_grad)
                      GemmNN(self.grad.data(), pb.value.raw(),
                             pa.EnsureGrad().data(), m, n, k);
                    if (pb.requires_grad)
                      GemmTN(self.grad.data(), pa.value.raw(),
                             pb.EnsureGrad().data(), m, n, k);
                  });
}

Var Transpose(const Var& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(j, i) = a(i, j);
  return MakeNode(std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j * r + i];
  });
}

// ---------------------------------------------------------------------------

namespace {

template <typename Op>
Var Binary(const Var& a, const Var& b, const char* name, Op op, double da_sign,
           double db_sign) {
  CheckShape(a.value().shape() == b.value().shape(), name, a, b);
  Tensor out(a.value().shape());
  const auto x = a.value().values();
  const auto y = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = op(x[i], y[i]);
  return MakeNode(std::move(out), {a.node_ptr(), b.node_ptr()},
                  [da_sign, db_sign](Node& self) {
                    for (int s = 0; s < 2; ++s) {
                      Node& p = *self.parents[s];
                      if (!p.requires_grad) continue;
                      const double sign = s == 0 ? da_sign : db_sign;
                      auto& g = p.EnsureGrad();
                      for (std::size_t i = 0; i < g.size(); ++i)
                        g[i] += sign * self.grad[i];
                    }
                  });
}

}  // namespace

Var Add(const Var& a, const Var& b) {
  return Binary(a, b, "Add", std::plus<>(), 1.0, 1.0);
}

Var Sub(const Var& a, const Var& b) {
  return Binary(a, b, "Sub", std::minus<>(), 1.0, -1.0);
}

Var Mul(const Var& a, const Var& b) {
  CheckShape(a.value().shape() == b.value().shape(), "Mul", a, b);
  Tensor out(a.value().shape());
  const auto x = a.value().values();
  const auto y = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = x[i] * y[i];
  return MakeNode(std::move(out), {a.node_ptr(), b.node_ptr()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    if (pa.requires_grad) {
      auto& g = pa.EnsureGrad();
      const auto y = pb.value.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.EnsureGrad();
      const auto x = pa.value.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x[i];
    }
  });
}

Var Div(const Var& a, const Var& b) {
  CheckShape(a.value().shape() == b.value().shape(), "Div", a, b);
  Tensor out(a.value().shape());
  const auto x = a.value().values();
  const auto y = b.value().values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = x[i] / y[i];
  return MakeNode(std::move(out), {a.node_ptr(), b.node_ptr()}, [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    const auto y = pb.value.values();
    if (pa.requires_grad) {
      auto& g = pa.EnsureGrad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / y[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.EnsureGrad();
      const auto q = self.value.values();
      for (std::size_t i = 0; i < g.size(); ++i)
        g[i] -= self.grad[i] * q[i] / y[i];
    }
  });
}

Var Scale(const Var& a, double factor) {
  return Unary(
      a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Var AddScalar(const Var& a, double offset) {
  return Unary(
      a, [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Var AddRow(const Var& a, const Var& row) {
  CheckShape(row.rows() == 1 && row.cols() == a.cols(), "AddRow", a, row);
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = a.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) += row(0, j);
  return MakeNode(std::move(out), {a.node_ptr(), row.node_ptr()},
                  [r, c](Node& self) {
                    Node& pa = *self.parents[0];
                    Node& pr = *self.parents[1];
                    if (pa.requires_grad) {
                      auto& g = pa.EnsureGrad();
                      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                    }
                    if (pr.requires_grad) {
                      auto& g = pr.EnsureGrad();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j)
                          g[j] += self.grad[i * c + j];
                    }
                  });
}

Var SubRow(const Var& a, const Var& row) { return AddRow(a, Scale(row, -1.0)); }

Var MulColumn(const Var& a, const Var& col) {
  CheckShape(col.cols() == 1 && col.rows() == a.rows(), "MulColumn", a, col);
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = a.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) *= col(i, 0);
  return MakeNode(std::move(out), {a.node_ptr(), col.node_ptr()},
                  [r, c](Node& self) {
                    Node& pa = *self.parents[0];
                    Node& pc = *self.parents[1];
                    if (pa.requires_grad) {
                      auto& g = pa.EnsureGrad();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j)
                          g[i * c + j] += self.grad[i * c + j] * pc.value(i, 0);
                    }
                    if (pc.requires_grad) {
                      auto& g = pc.EnsureGrad();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j)
                          g[i] += self.grad[i * c + j] * pa.value(i, j);
                    }
                  });
}

Var AddOuter(const Var& col, const Var& row) {
  CheckShape(col.cols() == 1 && row.rows() == 1, "AddOuter", col, row);
  const std::size_t r = col.rows(), c = row.cols();
  Tensor out = Tensor::Matrix(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = col(i, 0) + row(0, j);
  return MakeNode(std::move(out), {col.node_ptr(), row.node_ptr()},
                  [r, c](Node& self) {
                    Node& pc = *self.parents[0];
                    Node& pr = *self.parents[1];
                    if (pc.requires_grad) {
                      auto& g = pc.EnsureGrad();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j) g[i] += self.grad[i * c + j];
                    }
                    if (pr.requires_grad) {
                      auto& g = pr.EnsureGrad();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
                    }
                  });
}

Var RepeatRows(const Var& row, std::size_t count) {
  Require(row.rows() == 1, ErrorCode::kShapeMismatch,
          "RepeatRows expects a single row");
  const std::size_t c = row.cols();
  Tensor out = Tensor::Matrix(count, c);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = row(0, j);
  return MakeNode(std::move(out), {row.node_ptr()}, [count, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
  });
}

// ---------------------------------------------------------------------------

Var LeakyRelu(const Var& a, double slope) {
  return Unary(
      a, [slope](double x) { return x > 0 ? x : slope * x; },
      [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Var Tanh(const Var& a) {
  return Unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var Sigmoid(const Var& a) {
  return Unary(a, SigmoidScalar, [](double, double y) { return y * (1.0 - y); });
}

Var Softplus(const Var& a) {
  return Unary(
      a,
      [](double x) {
        return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
      },
      [](double x, double) { return SigmoidScalar(x); });
}

Var Exp(const Var& a) {
  return Unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var Log(const Var& a) {
  return Unary(
      a, [](double x) { return std::log(x); },
      [](double x, double) { return 1.0 / x; });
}

Var LogClamped(const Var& a, double floor) {
  return Unary(
      a, [floor](double x) { return std::log(std::max(x, floor)); },
      [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

Var Abs(const Var& a) {
  return Unary(
      a, [](double x) { return std::abs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Var Square(const Var& a) {
  return Unary(
      a, [](double x) { return x * x; },
      [](double x, double) { return 2.0 * x; });
}

// ---------------------------------------------------------------------------

Var ConcatCols(std::span<const Var> parts) {
  Require(!parts.empty(), ErrorCode::kShapeMismatch, "ConcatCols of nothing");
  const std::size_t r = parts[0].rows();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const Var& p : parts) {
    CheckShape(p.rows() == r, "ConcatCols", parts[0], p);
    offsets.push_back(total);
    total += p.cols();
    parents.push_back(p.node_ptr());
  }
  Tensor out = Tensor::Matrix(r, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(v.raw() + i * v.cols(), v.cols(),
                  out.raw() + i * total + offsets[k]);
  }
  return MakeNode(std::move(out), std::move(parents),
                  [offsets, total, r](Node& self) {
                    for (std::size_t k = 0; k < self.parents.size(); ++k) {
                      Node& p = *self.parents[k];
                      if (!p.requires_grad) continue;
                      auto& g = p.EnsureGrad();
                      const std::size_t c = p.cols();
                      for (std::size_t i = 0; i < r; ++i)
                        for (std::size_t j = 0; j < c; ++j)
                          g[i * c + j] += self.grad[i * total + offsets[k] + j];
                    }
                  });
}

Var ConcatRows(std::span<const Var> parts) {
  Require(!parts.empty(), ErrorCode::kShapeMismatch, "ConcatRows of nothing");
  const std::size_t c = parts[0].cols();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  std::vector<std::shared_ptr<Node>> parents;
  for (const Var& p : parts) {
    CheckShape(p.cols() == c, "ConcatRows", parts[0], p);
    offsets.push_back(total);
    total += p.rows();
    parents.push_back(p.node_ptr());
  }
  Tensor out = Tensor::Matrix(total, c);
  for (std::size_t k = 0; k < parts.size(); ++k)
    std::copy(parts[k].value().values().begin(), parts[k].value().values().end(),
              out.raw() + offsets[k] * c);
  return MakeNode(std::move(out), std::move(parents), [offsets, c](Node& self) {
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      Node& p = *self.parents[k];
      if (!p.requires_grad) continue;
      auto& g = p.EnsureGrad();
      const double* src = self.grad.data() + offsets[k] * c;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += src[i];
    }
  });
}

Var SliceRows(const Var& a, std::size_t begin, std::size_t count) {
  Require(begin + count <= a.rows(), ErrorCode::kShapeMismatch,
          "SliceRows out of range");
  const std::size_t c = a.cols();
  std::vector<double> values(a.value().raw() + begin * c,
                             a.value().raw() + (begin + count) * c);
  return MakeNode(Tensor({count, c}, std::move(values)), {a.node_ptr()},
                  [begin, c](Node& self) {
                    auto& g = self.parents[0]->EnsureGrad();
                    for (std::size_t i = 0; i < self.grad.size(); ++i)
                      g[begin * c + i] += self.grad[i];
                  });
}

Var SliceCols(const Var& a, std::size_t begin, std::size_t count) {
  Require(begin + count <= a.cols(), ErrorCode::kShapeMismatch,
          "SliceCols out of range");
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(r, count);
  for (std::size_t i = 0; i < r; ++i)
    std::copy_n(a.value().raw() + i * c + begin, count, out.raw() + i * count);
  return MakeNode(std::move(out), {a.node_ptr()},
                  [r, c, begin, count](Node& self) {
                    auto& g = self.parents[0]->EnsureGrad();
                    for (std::size_t i = 0; i < r; ++i)
                      for (std::size_t j = 0; j < count; ++j)
                        g[i * c + begin + j] += self.grad[i * count + j];
                  });
}

Var GatherRows(const Var& a, std::span<const std::size_t> indices) {
  const std::size_t c = a.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  Tensor out = Tensor::Matrix(idx.size(), c);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Require(idx[i] < a.rows(), ErrorCode::kShapeMismatch,
            "GatherRows index out of range");
    std::copy_n(a.value().raw() + idx[i] * c, c, out.raw() + i * c);
  }
  return MakeNode(std::move(out), {a.node_ptr()}, [idx, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) g[idx[i] * c + j] += self.grad[i * c + j];
  });
}

Var ScatterRows(const Var& a, std::span<const std::size_t> indices,
                std::size_t rows) {
  Require(indices.size() == a.rows(), ErrorCode::kShapeMismatch,
          "ScatterRows needs one index per row");
  const std::size_t c = a.cols();
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  Tensor out = Tensor::Matrix(rows, c);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Require(idx[i] < rows, ErrorCode::kShapeMismatch,
            "ScatterRows index out of range");
    std::copy_n(a.value().raw() + i * c, c, out.raw() + idx[i] * c);
  }
  return MakeNode(std::move(out), {a.node_ptr()}, [idx, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[idx[i] * c + j];
  });
}

Var Reshape(const Var& a, std::size_t rows, std::size_t cols) {
  Require(rows * cols == a.size(), ErrorCode::kShapeMismatch,
          "Reshape changes element count");
  return MakeNode(a.value().Reshaped({rows, cols}), {a.node_ptr()},
                  [](Node& self) {
                    auto& g = self.parents[0]->EnsureGrad();
                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                  });
}

// ---------------------------------------------------------------------------

Var Sum(const Var& a) {
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return MakeNode(Tensor({1, 1}, {total}), {a.node_ptr()}, [](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (double& x : g) x += self.grad[0];
  });
}

Var Mean(const Var& a) { return Scale(Sum(a), 1.0 / static_cast<double>(a.size())); }

Var SumRows(const Var& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(1, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(0, j) += a(i, j);
  return MakeNode(std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[j];
  });
}

Var SumCols(const Var& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(r, 1);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, 0) += a(i, j);
  return MakeNode(std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += self.grad[i];
  });
}

Var RowNorms(const Var& a) {
  const std::size_t r = a.rows(), c = a.cols();
  Tensor out = Tensor::Matrix(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += a(i, j) * a(i, j);
    out(i, 0) = std::sqrt(s);
  }
  return MakeNode(std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    Node& p = *self.parents[0];
    auto& g = p.EnsureGrad();
    for (std::size_t i = 0; i < r; ++i) {
      const double n = self.value(i, 0);
      if (n == 0.0) continue;
      const double scale = self.grad[i] / n;
      for (std::size_t j = 0; j < c; ++j) g[i * c + j] += scale * p.value(i, j);
    }
  });
}

// ---------------------------------------------------------------------------

Var MaskedSoftmaxRows(const Var& a, std::span<const std::uint8_t> mask) {
  const std::size_t r = a.rows(), c = a.cols();
  const bool per_row = mask.size() == r * c && r > 1;
  Require(mask.empty() || mask.size() == c || mask.size() == r * c,
          ErrorCode::kShapeMismatch, "softmax mask has the wrong size");
  auto allowed = [&](std::size_t i, std::size_t j) {
    if (mask.empty()) return true;
    return mask[per_row ? i * c + j : j] != 0;
  };
  Tensor out = Tensor::Matrix(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j)
      if (allowed(i, j)) best = std::max(best, a(i, j));
    if (best == -std::numeric_limits<double>::infinity()) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      if (!allowed(i, j)) continue;
      out(i, j) = std::exp(a(i, j) - best);
      total += out(i, j);
    }
    for (std::size_t j = 0; j < c; ++j) out(i, j) /= total;
  }
  return MakeNode(std::move(out), {a.node_ptr()}, [r, c](Node& self) {
    auto& g = self.parents[0]->EnsureGrad();
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j)
        dot += self.value(i, j) * self.grad[i * c + j];
      for (std::size_t j = 0; j < c; ++j)
        g[i * c + j] += self.value(i, j) * (self.grad[i * c + j] - dot);
    }
  });
}

Var SoftmaxRows(const Var& a) { return MaskedSoftmaxRows(a, {}); }

Var LayerNormRows(const Var& a, const Var& gamma, const Var& beta, double eps) {
  const std::size_t r = a.rows(), c = a.cols();
  CheckShape(gamma.rows() == 1 && gamma.cols() == c, "LayerNorm gamma", a, gamma);
  CheckShape(beta.rows() == 1 && beta.cols() == c, "LayerNorm beta", a, beta);
  Tensor out = Tensor::Matrix(r, c);
  auto normalized = std::make_shared<std::vector<double>>(r * c);
  auto inv_std = std::make_shared<std::vector<double>>(r);
  for (std::size_t i = 0; i < r; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < c; ++j) mean += a(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (a(i, j) - mean) * (a(i, j) - mean);
    var /= static_cast<double>(c);
    const double s = 1.0 / std::sqrt(var + eps);
    (*inv_std)[i] = s;
    for (std::size_t j = 0; j < c; ++j) {
      const double xhat = (a(i, j) - mean) * s;
      (*normalized)[i * c + j] = xhat;
      out(i, j) = gamma(0, j) * xhat + beta(0, j);
    }
  }
  return MakeNode(
      std::move(out), {a.node_ptr(), gamma.node_ptr(), beta.node_ptr()},
      [r, c, normalized, inv_std](Node& self) {
        Node& pa = *self.parents[0];
        Node& pg = *self.parents[1];
        Node& pb = *self.parents[2];
        const auto& xhat = *normalized;
        if (pg.requires_grad) {
          auto& g = pg.EnsureGrad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
              g[j] += self.grad[i * c + j] * xhat[i * c + j];
        }
        if (pb.requires_grad) {
          auto& g = pb.EnsureGrad();
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) g[j] += self.grad[i * c + j];
        }
        if (pa.requires_grad) {
          auto& g = pa.EnsureGrad();
          const double n = static_cast<double>(c);
          for (std::size_t i = 0; i < r; ++i) {
            double mean_d = 0.0, mean_dx = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
              const double d = self.grad[i * c + j] * pg.value(0, j);
              mean_d += d;
              mean_dx += d * xhat[i * c + j];
            }
            mean_d /= n;
            mean_dx /= n;
            for (std::size_t j = 0; j < c; ++j) {
              const double d = self.grad[i * c + j] * pg.value(0, j);
              g[i * c + j] +=
                  (*inv_std)[i] * (d - mean_d - xhat[i * c + j] * mean_dx);
            }
          }
        }
      });
}

Var GruCell(const Var& gx, const Var& gh, const Var& h) {
  const std::size_t b = h.rows(), hd = h.cols();
  Require(gx.rows() == b && gh.rows() == b && gx.cols() == 3 * hd &&
              gh.cols() == 3 * hd,
          ErrorCode::kShapeMismatch, "GruCell gate shapes do not match state");
  auto gates = std::make_shared<std::vector<double>>(3 * b * hd);  // z, r, n
  Tensor out = Tensor::Matrix(b, hd);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < hd; ++j) {
      const double z = SigmoidScalar(gx(i, j) + gh(i, j));
      const double r = SigmoidScalar(gx(i, hd + j) + gh(i, hd + j));
      const double n = std::tanh(gx(i, 2 * hd + j) + r * gh(i, 2 * hd + j));
      (*gates)[(i * hd + j) * 3 + 0] = z;
      (*gates)[(i * hd + j) * 3 + 1] = r;
      (*gates)[(i * hd + j) * 3 + 2] = n;
      out(i, j) = (1.0 - z) * n + z * h(i, j);
    }
  }
  return MakeNode(
      std::move(out), {gx.node_ptr(), gh.node_ptr(), h.node_ptr()},
      [b, hd, gates](Node& self) {
        Node& px = *self.parents[0];
        Node& ph = *self.parents[1];
        Node& pst = *self.parents[2];
        double* gxg = px.requires_grad ? px.EnsureGrad().data() : nullptr;
        double* ghg = ph.requires_grad ? ph.EnsureGrad().data() : nullptr;
        double* hg = pst.requires_grad ? pst.EnsureGrad().data() : nullptr;
        const std::size_t w = 3 * hd;
        for (std::size_t i = 0; i < b; ++i) {
          for (std::size_t j = 0; j < hd; ++j) {
            const double dout = self.grad[i * hd + j];
            const double z = (*gates)[(i * hd + j) * 3 + 0];
            const double r = (*gates)[(i * hd + j) * 3 + 1];
            const double n = (*gates)[(i * hd + j) * 3 + 2];
            const double hprev = pst.value(i, j);
            const double dn_pre = dout * (1.0 - z) * (1.0 - n * n);
            const double dz_pre = dout * (hprev - n) * z * (1.0 - z);
            const double dr_pre = dn_pre * ph.value(i, 2 * hd + j) * r * (1.0 - r);
            if (gxg) {
              gxg[i * w + j] += dz_pre;
              gxg[i * w + hd + j] += dr_pre;
              gxg[i * w + 2 * hd + j] += dn_pre;
            }
            if (ghg) {
              ghg[i * w + j] += dz_pre;
              ghg[i * w + hd + j] += dr_pre;
              ghg[i * w + 2 * hd + j] += dn_pre * r;
            }
            if (hg) hg[i * hd + j] += dout * z;
          }
        }
      });
}

}  // namespace gcgat::diff

// Copyright 2026 The cfpower Authors.
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

#include "cfpower/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cfpower::nn {

namespace {

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw std::invalid_argument(std::string(op) + ": expected a rank-2 tensor");
}

// Gradient buffer of input i, or nullptr when that input needs no gradient.
Tensor* input_grad(Node& n, std::size_t i) {
  Node& p = *n.parents[i];
  return p.requires_grad ? &p.grad_buffer() : nullptr;
}

struct Broadcast {
  std::size_t rows, cols;      // output shape
  std::size_t b_rows, b_cols;  // right operand shape

  std::size_t b_index(std::size_t r, std::size_t c) const {
    return (b_rows == 1 ? 0 : r) * b_cols + (b_cols == 1 ? 0 : c);
  }
};

Broadcast check_broadcast(const Tensor& a, const Tensor& b, const char* op) {
  require_rank2(a, op);
  require_rank2(b, op);
  const bool ok = (b.rows() == a.rows() || b.rows() == 1) && (b.cols() == a.cols() || b.cols() == 1);
  if (!ok)
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                                b.shape_string());
  return {a.rows(), a.cols(), b.rows(), b.cols()};
}

template <typename F>
Tensor map(const Tensor& x, F f) {
  Tensor y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  return y;
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require_rank2(A, "matmul");
  require_rank2(B, "matmul");
  if (A.cols() != B.rows())
    throw std::invalid_argument("matmul: shape mismatch " + A.shape_string() + " x " + B.shape_string());
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = &C(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A(i, p);
      if (av == 0.0) continue;
      const double* brow = B.data().data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return make_op(std::move(C), "matmul", {a, b}, [m, k, n](Node& node) {
    const Tensor& G = node.grad;
    const Tensor& A = node.parents[0]->value;
    const Tensor& B = node.parents[1]->value;
    if (Tensor* ga = input_grad(node, 0)) {
      // dA = dC B^T
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += G(i, j) * B(p, j);
          (*ga)(i, p) += acc;
        }
    }
    if (Tensor* gb = input_grad(node, 1)) {
      // dB = A^T dC
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A(i, p);
          if (av == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) (*gb)(p, j) += av * G(i, j);
        }
    }
  });
}

Var add(const Var& a, const Var& b) {
  const Broadcast bc = check_broadcast(a.value(), b.value(), "add");
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t r = 0; r < bc.rows; ++r)
    for (std::size_t c = 0; c < bc.cols; ++c) out(r, c) += B[bc.b_index(r, c)];
  return make_op(std::move(out), "add", {a, b}, [bc](Node& node) {
    const Tensor& G = node.grad;
    if (Tensor* ga = input_grad(node, 0))
      for (std::size_t i = 0; i < G.size(); ++i) (*ga)[i] += G[i];
    if (Tensor* gb = input_grad(node, 1))
      for (std::size_t r = 0; r < bc.rows; ++r)
        for (std::size_t c = 0; c < bc.cols; ++c) (*gb)[bc.b_index(r, c)] += G(r, c);
  });
}

Var sub(const Var& a, const Var& b) {
  const Broadcast bc = check_broadcast(a.value(), b.value(), "sub");
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t r = 0; r < bc.rows; ++r)
    for (std::size_t c = 0; c < bc.cols; ++c) out(r, c) -= B[bc.b_index(r, c)];
  return make_op(std::move(out), "sub", {a, b}, [bc](Node& node) {
    const Tensor& G = node.grad;
    if (Tensor* ga = input_grad(node, 0))
      for (std::size_t i = 0; i < G.size(); ++i) (*ga)[i] += G[i];
    if (Tensor* gb = input_grad(node, 1))
      for (std::size_t r = 0; r < bc.rows; ++r)
        for (std::size_t c = 0; c < bc.cols; ++c) (*gb)[bc.b_index(r, c)] -= G(r, c);
  });
}

Var mul(const Var& a, const Var& b) {
  const Broadcast bc = check_broadcast(a.value(), b.value(), "mul");
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t r = 0; r < bc.rows; ++r)
    for (std::size_t c = 0; c < bc.cols; ++c) out(r, c) *= B[bc.b_index(r, c)];
  return make_op(std::move(out), "mul", {a, b}, [bc](Node& node) {
    const Tensor& G = node.grad;
    const Tensor& A = node.parents[0]->value;
    const Tensor& B = node.parents[1]->value;
    Tensor* ga = input_grad(node, 0);
    Tensor* gb = input_grad(node, 1);
    for (std::size_t r = 0; r < bc.rows; ++r)
      for (std::size_t c = 0; c < bc.cols; ++c) {
        const std::size_t bi = bc.b_index(r, c);
        if (ga) (*ga)(r, c) += G(r, c) * B[bi];
        if (gb) (*gb)[bi] += G(r, c) * A(r, c);
      }
  });
}

Var div(const Var& a, const Var& b) {
  const Broadcast bc = check_broadcast(a.value(), b.value(), "div");
  Tensor out = a.value();
  const Tensor& B = b.value();
  for (std::size_t r = 0; r < bc.rows; ++r)
    for (std::size_t c = 0; c < bc.cols; ++c) out(r, c) /= B[bc.b_index(r, c)];
  return make_op(std::move(out), "div", {a, b}, [bc](Node& node) {
    const Tensor& G = node.grad;
    const Tensor& A = node.parents[0]->value;
    const Tensor& B = node.parents[1]->value;
    Tensor* ga = input_grad(node, 0);
    Tensor* gb = input_grad(node, 1);
    for (std::size_t r = 0; r < bc.rows; ++r)
      for (std::size_t c = 0; c < bc.cols; ++c) {
        const std::size_t bi = bc.b_index(r, c);
        const double bv = B[bi];
        if (ga) (*ga)(r, c) += G(r, c) / bv;
        if (gb) (*gb)[bi] -= G(r, c) * A(r, c) / (bv * bv);
      }
  });
}

Var scale(const Var& a, double s) {
  Tensor out = map(a.value(), [s](double v) { return v * s; });
  return make_op(std::move(out), "scale", {a}, [s](Node& node) {
    if (Tensor* ga = input_grad(node, 0))
      for (std::size_t i = 0; i < node.grad.size(); ++i) (*ga)[i] += s * node.grad[i];
  });
}

Var relu(const Var& x) {
  require_rank2(x.value(), "relu");
  Tensor out = map(x.value(), [](double v) { return v > 0.0 ? v : 0.0; });
  return make_op(std::move(out), "relu", {x}, [](Node& node) {
    const Tensor& X = node.parents[0]->value;
    if (Tensor* gx = input_grad(node, 0))
      for (std::size_t i = 0; i < X.size(); ++i)
        if (X[i] > 0.0) (*gx)[i] += node.grad[i];
  });
}

Var sigmoid(const Var& x) {
  require_rank2(x.value(), "sigmoid");
  Tensor out = map(x.value(), [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
  return make_op(std::move(out), "sigmoid", {x}, [](Node& node) {
    const Tensor& Y = node.value;
    if (Tensor* gx = input_grad(node, 0))
      for (std::size_t i = 0; i < Y.size(); ++i) (*gx)[i] += node.grad[i] * Y[i] * (1.0 - Y[i]);
  });
}

Var softmax_rows(const Var& x) {
  const Tensor& X = x.value();
  require_rank2(X, "softmax");
  if (X.cols() == 0) throw std::invalid_argument("softmax: empty row");
  Tensor Y(X.rows(), X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < X.cols(); ++c) mx = std::max(mx, X(r, c));
    double total = 0.0;
    for (std::size_t c = 0; c < X.cols(); ++c) total += Y(r, c) = std::exp(X(r, c) - mx);
    for (std::size_t c = 0; c < X.cols(); ++c) Y(r, c) /= total;
  }
  return make_op(std::move(Y), "softmax", {x}, [](Node& node) {
    const Tensor& Y = node.value;
    const Tensor& G = node.grad;
    Tensor* gx = input_grad(node, 0);
    if (!gx) return;
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < Y.cols(); ++c) dot += G(r, c) * Y(r, c);
      for (std::size_t c = 0; c < Y.cols(); ++c) (*gx)(r, c) += Y(r, c) * (G(r, c) - dot);
    }
  });
}

Var layer_norm(const Var& x, double eps) {
  const Tensor& X = x.value();
  require_rank2(X, "layer_norm");
  const std::size_t n = X.cols();
  if (n == 0) throw std::invalid_argument("layer_norm: empty row");
  Tensor Y(X.rows(), n);
  std::vector<double> inv_std(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < n; ++c) mu += X(r, c);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (X(r, c) - mu) * (X(r, c) - mu);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) Y(r, c) = (X(r, c) - mu) * inv_std[r];
  }
  return make_op(std::move(Y), "layer_norm", {x}, [inv_std = std::move(inv_std), n](Node& node) {
    Tensor* gx = input_grad(node, 0);
    if (!gx) return;
    const Tensor& Y = node.value;
    const Tensor& G = node.grad;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      double g_mean = 0.0, gy_mean = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        g_mean += G(r, c);
        gy_mean += G(r, c) * Y(r, c);
      }
      g_mean *= inv_n;
      gy_mean *= inv_n;
      for (std::size_t c = 0; c < n; ++c)
        (*gx)(r, c) += inv_std[r] * (G(r, c) - g_mean - Y(r, c) * gy_mean);
    }
  });
}

Var dropout(const Var& x, double rate, bool train, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must lie in [0, 1)");
  if (!train || rate == 0.0) return x;
  const Tensor& X = x.value();
  Tensor mask(X.rows(), X.cols());
  std::bernoulli_distribution keep(1.0 - rate);
  const double survivor = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = keep(rng) ? survivor : 0.0;
  Tensor out = X;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return make_op(std::move(out), "dropout", {x}, [mask = std::move(mask)](Node& node) {
    if (Tensor* gx = input_grad(node, 0))
      for (std::size_t i = 0; i < mask.size(); ++i) (*gx)[i] += node.grad[i] * mask[i];
  });
}

Var transpose(const Var& x) {
  const Tensor& X = x.value();
  require_rank2(X, "transpose");
  Tensor T(X.cols(), X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) T(c, r) = X(r, c);
  return make_op(std::move(T), "transpose", {x}, [](Node& node) {
    Tensor* gx = input_grad(node, 0);
    if (!gx) return;
    const Tensor& G = node.grad;
    for (std::size_t r = 0; r < G.rows(); ++r)
      for (std::size_t c = 0; c < G.cols(); ++c) (*gx)(c, r) += G(r, c);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    require_rank2(p.value(), "concat");
    if (p.rows() != rows) throw std::invalid_argument("concat: row counts differ");
    offsets.push_back(cols);
    cols += p.cols();
  }
  Tensor out(rows, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& P = parts[i].value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < P.cols(); ++c) out(r, offsets[i] + c) = P(r, c);
  }
  return make_op(std::move(out), "concat", parts, [offsets](Node& node) {
    const Tensor& G = node.grad;
    for (std::size_t i = 0; i < node.parents.size(); ++i) {
      Tensor* gp = input_grad(node, i);
      if (!gp) continue;
      for (std::size_t r = 0; r < gp->rows(); ++r)
        for (std::size_t c = 0; c < gp->cols(); ++c) (*gp)(r, c) += G(r, offsets[i] + c);
    }
  });
}

Var slice_cols(const Var& x, std::size_t start, std::size_t count) {
  const Tensor& X = x.value();
  require_rank2(X, "slice");
  if (start + count > X.cols()) throw std::invalid_argument("slice: column range out of bounds");
  Tensor out(X.rows(), count);
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = X(r, start + c);
  return make_op(std::move(out), "slice", {x}, [start, count](Node& node) {
    Tensor* gx = input_grad(node, 0);
    if (!gx) return;
    const Tensor& G = node.grad;
    for (std::size_t r = 0; r < G.rows(); ++r)
      for (std::size_t c = 0; c < count; ++c) (*gx)(r, start + c) += G(r, c);
  });
}

Var mean_rows(const Var& x) {
  const Tensor& X = x.value();
  require_rank2(X, "mean_rows");
  if (X.rows() == 0) throw std::invalid_argument("mean_rows: no rows");
  Tensor out(1, X.cols());
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t c = 0; c < X.cols(); ++c) out(0, c) += X(r, c);
  const double inv = 1.0 / static_cast<double>(X.rows());
  for (std::size_t c = 0; c < X.cols(); ++c) out(0, c) *= inv;
  return make_op(std::move(out), "mean_rows", {x}, [inv](Node& node) {
    Tensor* gx = input_grad(node, 0);
    if (!gx) return;
    for (std::size_t r = 0; r < gx->rows(); ++r)
      for (std::size_t c = 0; c < gx->cols(); ++c) (*gx)(r, c) += inv * node.grad(0, c);
  });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  return make_op(Tensor::scalar(total), "sum", {x}, [](Node& node) {
    if (Tensor* gx = input_grad(node, 0))
      for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += node.grad[0];
  });
}

Var mean(const Var& x) {
  const std::size_t n = x.value().size();
  if (n == 0) throw std::invalid_argument("mean: empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(n));
}

}  // namespace cfpower::nn

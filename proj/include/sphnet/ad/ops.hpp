// Copyright 2026 The sphnet Authors.
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

#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "sphnet/ad/graph.hpp"

namespace sphnet::ad {

template <class T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatMap = Eigen::Map<RowMat<T>>;
template <class T>
using CMatMap = Eigen::Map<const RowMat<T>>;

/// Smoothing constant for L2 norms: norm = sqrt(sum x^2 + eps^2), so the
/// gradient stays finite at exactly-zero vectors.
template <class T>
constexpr T norm_guard_eps();
template <>
constexpr double norm_guard_eps<double>() { return 1e-12; }
template <>
constexpr float norm_guard_eps<float>() { return 1e-6f; }

namespace detail {

inline constexpr std::int64_t kParallelFlops = 1 << 20;

template <class T>
void gemm_add(const T* a, std::int64_t am, std::int64_t an, bool at, const T* b, std::int64_t bm,
              std::int64_t bn, bool bt, T* c) {
  const std::int64_t m = at ? an : am;
  const std::int64_t k = at ? am : an;
  const std::int64_t n = bt ? bm : bn;
  check_arg((bt ? bn : bm) == k, "gemm: inner dimensions disagree");

  CMatMap<T> A(a, am, an), B(b, bm, bn);
  MatMap<T> C(c, m, n);
  const bool parallel = 2 * m * k * n > kParallelFlops;
  if (!parallel) {
    if (!at && !bt) C.noalias() += A * B;
    else if (at && !bt) C.noalias() += A.transpose() * B;
    else if (!at && bt) C.noalias() += A * B.transpose();
    else C.noalias() += A.transpose() * B.transpose();
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t r0 = 0; r0 < m; r0 += 64) {
    const std::int64_t len = std::min<std::int64_t>(64, m - r0);
    auto Cb = C.middleRows(r0, len);
    if (!at && !bt) Cb.noalias() += A.middleRows(r0, len) * B;
    else if (at && !bt) Cb.noalias() += A.middleCols(r0, len).transpose() * B;
    else if (!at && bt) Cb.noalias() += A.middleRows(r0, len) * B.transpose();
    else Cb.noalias() += A.middleCols(r0, len).transpose() * B.transpose();
  }
}

template <class T, class F>
void elementwise(std::int64_t n, F&& f) {
  if (n > (1 << 16)) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) f(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) f(i);
  }
}

template <class T>
NodeP<T> fresh(Tensor<T> value, std::vector<NodeP<T>> parents) {
  auto out = std::make_shared<Node<T>>();
  out->value = std::move(value);
  for (const auto& p : parents)
    if (p->requires_grad) out->requires_grad = true;
  out->parents = std::move(parents);
  return out;
}

/// Splits an index space around `axis`: total = pre * n * post.
inline void axis_extents(const Shape& s, int axis, std::int64_t& pre, std::int64_t& n,
                         std::int64_t& post) {
  check_arg(axis >= 0 && axis < static_cast<int>(s.size()), "axis out of range");
  pre = 1;
  post = 1;
  for (int i = 0; i < axis; ++i) pre *= s[i];
  n = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) post *= s[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise and linear ops
// ---------------------------------------------------------------------------

template <class T>
NodeP<T> add(NodeP<T> a, NodeP<T> b) {
  check_arg(a->value.shape == b->value.shape, "add: shape mismatch");
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  const T* pb = b->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = pa[i] + pb[i]; });
  auto out = detail::fresh<T>(std::move(v), {a, b});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    Node<T>* nb = b.get();
    out->backprop = [o, na, nb] {
      for (Node<T>* p : {na, nb})
        if (p->requires_grad) {
          p->ensure_grad();
          T* pg = p->grad.data();
          const T* og = o->grad.data();
          detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { pg[i] += og[i]; });
        }
    };
  }
  return out;
}

template <class T>
NodeP<T> mul(NodeP<T> a, NodeP<T> b) {
  check_arg(a->value.shape == b->value.shape, "mul: shape mismatch");
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  const T* pb = b->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = pa[i] * pb[i]; });
  auto out = detail::fresh<T>(std::move(v), {a, b});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    Node<T>* nb = b.get();
    out->backprop = [o, na, nb] {
      const T* og = o->grad.data();
      if (na->requires_grad) {
        na->ensure_grad();
        T* g = na->grad.data();
        const T* vb = nb->value.data();
        detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { g[i] += og[i] * vb[i]; });
      }
      if (nb->requires_grad) {
        nb->ensure_grad();
        T* g = nb->grad.data();
        const T* va = na->value.data();
        detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { g[i] += og[i] * va[i]; });
      }
    };
  }
  return out;
}

template <class T>
NodeP<T> scale(NodeP<T> a, T c) {
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = c * pa[i]; });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, c] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { g[i] += c * og[i]; });
    };
  }
  return out;
}

template <class T>
NodeP<T> sub(NodeP<T> a, NodeP<T> b) {
  return add(a, scale(b, T(-1)));
}

template <class T>
NodeP<T> relu(NodeP<T> a) {
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = pa[i] > T(0) ? pa[i] : T(0); });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* va = na->value.data();
      detail::elementwise<T>(o->grad.numel(),
                             [&](std::int64_t i) { g[i] += va[i] > T(0) ? og[i] : T(0); });
    };
  }
  return out;
}

template <class T>
NodeP<T> exp(NodeP<T> a) {
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = std::exp(pa[i]); });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* ov = o->value.data();
      detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { g[i] += og[i] * ov[i]; });
    };
  }
  return out;
}

template <class T>
NodeP<T> matmul(NodeP<T> a, NodeP<T> b) {
  check_arg(a->value.rank() == 2 && b->value.rank() == 2, "matmul: operands must be rank 2");
  const std::int64_t m = a->value.dim(0), k = a->value.dim(1), n = b->value.dim(1);
  check_arg(b->value.dim(0) == k, "matmul: inner dimensions disagree");
  Tensor<T> v = Tensor<T>::zeros({m, n});
  detail::gemm_add(a->value.data(), m, k, false, b->value.data(), k, n, false, v.data());
  auto out = detail::fresh<T>(std::move(v), {a, b});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    Node<T>* nb = b.get();
    out->backprop = [o, na, nb, m, k, n] {
      if (na->requires_grad) {
        na->ensure_grad();
        detail::gemm_add(o->grad.data(), m, n, false, nb->value.data(), k, n, true,
                         na->grad.data());
      }
      if (nb->requires_grad) {
        nb->ensure_grad();
        detail::gemm_add(na->value.data(), m, k, true, o->grad.data(), m, n, false,
                         nb->grad.data());
      }
    };
  }
  return out;
}

template <class T>
NodeP<T> reshape(NodeP<T> a, Shape shape) {
  check_arg(shape_numel(shape) == a->value.numel(), "reshape: element count must be preserved");
  Tensor<T> v(std::move(shape), a->value.v);
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      detail::elementwise<T>(o->grad.numel(), [&](std::int64_t i) { g[i] += og[i]; });
    };
  }
  return out;
}

/// Right-aligned broadcast to a larger shape (missing leading axes added;
/// size-1 axes expanded). Backward sums over the broadcast axes.
template <class T>
NodeP<T> broadcast_to(NodeP<T> a, Shape shape) {
  const Shape& in = a->value.shape;
  const int off = static_cast<int>(shape.size()) - static_cast<int>(in.size());
  check_arg(off >= 0, "broadcast_to: target rank must not shrink");
  for (std::size_t i = 0; i < in.size(); ++i)
    check_arg(in[i] == shape[off + i] || in[i] == 1,
              "broadcast_to: incompatible shapes " + shape_str(in) + " -> " + shape_str(shape));

  const int rank = static_cast<int>(shape.size());
  std::vector<std::int64_t> in_stride(rank, 0);
  {
    std::int64_t s = 1;
    for (int i = static_cast<int>(in.size()) - 1; i >= 0; --i) {
      in_stride[off + i] = (in[i] == 1) ? 0 : s;
      s *= in[i];
    }
  }
  std::vector<std::int64_t> out_stride(rank, 1);
  for (int i = rank - 2; i >= 0; --i) out_stride[i] = out_stride[i + 1] * shape[i + 1];

  auto map_index = [rank, out_stride, in_stride](std::int64_t flat) {
    std::int64_t src = 0;
    for (int d = 0; d < rank; ++d) {
      const std::int64_t q = flat / out_stride[d];
      flat -= q * out_stride[d];
      src += q * in_stride[d];
    }
    return src;
  };

  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = pa[map_index(i)]; });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, map_index] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const std::int64_t n = o->grad.numel();
      for (std::int64_t i = 0; i < n; ++i) g[map_index(i)] += og[i];
    };
  }
  return out;
}

template <class T>
NodeP<T> concat(std::vector<NodeP<T>> parts, int axis) {
  check_arg(!parts.empty(), "concat: no inputs");
  Shape shape = parts[0]->value.shape;
  check_arg(axis >= 0 && axis < static_cast<int>(shape.size()), "concat: axis out of range");
  std::int64_t total = 0;
  for (const auto& p : parts) {
    check_arg(p->value.rank() == static_cast<int>(shape.size()), "concat: rank mismatch");
    for (int d = 0; d < p->value.rank(); ++d)
      check_arg(d == axis || p->value.shape[d] == shape[d], "concat: shape mismatch off-axis");
    total += p->value.dim(axis);
  }
  shape[axis] = total;

  std::int64_t pre, n_out, post;
  detail::axis_extents(shape, axis, pre, n_out, post);

  Tensor<T> v = Tensor<T>::zeros(shape);
  std::vector<std::int64_t> offsets(parts.size() + 1, 0);
  for (std::size_t p = 0; p < parts.size(); ++p)
    offsets[p + 1] = offsets[p] + parts[p]->value.dim(axis);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::int64_t np = parts[p]->value.dim(axis);
    const T* src = parts[p]->value.data();
    for (std::int64_t i = 0; i < pre; ++i)
      std::copy(src + i * np * post, src + (i + 1) * np * post,
                v.data() + (i * n_out + offsets[p]) * post);
  }
  auto out = detail::fresh<T>(std::move(v), parts);
  if (out->requires_grad) {
    Node<T>* o = out.get();
    std::vector<Node<T>*> raw;
    raw.reserve(parts.size());
    for (const auto& p : parts) raw.push_back(p.get());
    out->backprop = [o, raw, offsets, pre, n_out, post] {
      const T* og = o->grad.data();
      for (std::size_t p = 0; p < raw.size(); ++p) {
        if (!raw[p]->requires_grad) continue;
        raw[p]->ensure_grad();
        T* g = raw[p]->grad.data();
        const std::int64_t np = offsets[p + 1] - offsets[p];
        for (std::int64_t i = 0; i < pre; ++i) {
          const T* src = og + (i * n_out + offsets[p]) * post;
          T* dst = g + i * np * post;
          for (std::int64_t j = 0; j < np * post; ++j) dst[j] += src[j];
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indexing
// ---------------------------------------------------------------------------

/// out[i, ...] = a[idx[i], ...] over the leading axis.
template <class T>
NodeP<T> gather_rows(NodeP<T> a, std::vector<std::int64_t> idx) {
  check_arg(a->value.rank() >= 1, "gather_rows: input must have rank >= 1");
  const std::int64_t rows = a->value.dim(0);
  const std::int64_t width = a->value.numel() / std::max<std::int64_t>(rows, 1);
  for (std::int64_t i : idx) check_arg(i >= 0 && i < rows, "gather_rows: index out of range");

  Shape shape = a->value.shape;
  shape[0] = static_cast<std::int64_t>(idx.size());
  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* src = a->value.data();
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy(src + idx[i] * width, src + (idx[i] + 1) * width, v.data() + i * width);
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, idx = std::move(idx), width] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        T* dst = g + idx[i] * width;
        const T* s = og + i * width;
        for (std::int64_t j = 0; j < width; ++j) dst[j] += s[j];
      }
    };
  }
  return out;
}

/// out has `rows` leading entries; out[idx[i], ...] += src[i, ...].
template <class T>
NodeP<T> scatter_add_rows(NodeP<T> src, std::vector<std::int64_t> idx, std::int64_t rows) {
  check_arg(src->value.rank() >= 1, "scatter_add_rows: input must have rank >= 1");
  check_arg(static_cast<std::int64_t>(idx.size()) == src->value.dim(0),
            "scatter_add_rows: one index per input row required");
  const std::int64_t width =
      src->value.numel() / std::max<std::int64_t>(src->value.dim(0), 1);
  for (std::int64_t i : idx) check_arg(i >= 0 && i < rows, "scatter_add_rows: index out of range");

  Shape shape = src->value.shape;
  shape[0] = rows;
  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* s = src->value.data();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    T* dst = v.data() + idx[i] * width;
    for (std::int64_t j = 0; j < width; ++j) dst[j] += s[i * width + j];
  }
  auto out = detail::fresh<T>(std::move(v), {src});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* ns = src.get();
    out->backprop = [o, ns, idx = std::move(idx), width] {
      ns->ensure_grad();
      T* g = ns->grad.data();
      const T* og = o->grad.data();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        const T* from = og + idx[i] * width;
        for (std::int64_t j = 0; j < width; ++j) g[i * width + j] += from[j];
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

template <class T>
NodeP<T> reduce_sum(NodeP<T> a, int axis) {
  std::int64_t pre, n, post;
  detail::axis_extents(a->value.shape, axis, pre, n, post);
  Shape shape = a->value.shape;
  shape.erase(shape.begin() + axis);
  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(pre * post, [&](std::int64_t o) {
    const std::int64_t i = o / post, j = o % post;
    T acc = T(0);
    for (std::int64_t r = 0; r < n; ++r) acc += pa[(i * n + r) * post + j];
    pv[o] = acc;
  });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, pre, n, post] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      detail::elementwise<T>(pre * post, [&](std::int64_t off) {
        const std::int64_t i = off / post, j = off % post;
        for (std::int64_t r = 0; r < n; ++r) g[(i * n + r) * post + j] += og[off];
      });
    };
  }
  return out;
}

/// Max over an axis; ties route the gradient to the lowest index.
template <class T>
NodeP<T> reduce_max(NodeP<T> a, int axis) {
  std::int64_t pre, n, post;
  detail::axis_extents(a->value.shape, axis, pre, n, post);
  check_arg(n >= 1, "reduce_max: reduced axis is empty");
  Shape shape = a->value.shape;
  shape.erase(shape.begin() + axis);
  Tensor<T> v = Tensor<T>::zeros(shape);
  auto argmax = std::make_shared<std::vector<std::int32_t>>(static_cast<std::size_t>(pre * post));
  const T* pa = a->value.data();
  T* pv = v.data();
  std::int32_t* am = argmax->data();
  detail::elementwise<T>(pre * post, [&](std::int64_t o) {
    const std::int64_t i = o / post, j = o % post;
    T best = pa[i * n * post + j];
    std::int32_t arg = 0;
    for (std::int64_t r = 1; r < n; ++r) {
      const T cand = pa[(i * n + r) * post + j];
      if (cand > best) {
        best = cand;
        arg = static_cast<std::int32_t>(r);
      }
    }
    pv[o] = best;
    am[o] = arg;
  });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, pre, n, post, argmax] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const std::int32_t* am2 = argmax->data();
      detail::elementwise<T>(pre * post, [&](std::int64_t off) {
        const std::int64_t i = off / post, j = off % post;
        g[(i * n + am2[off]) * post + j] += og[off];
      });
    };
  }
  return out;
}

template <class T>
NodeP<T> sum_all(NodeP<T> a) {
  auto flat = reshape(a, {a->value.numel()});
  return reduce_sum(flat, 0);
}

/// Guarded L2 norm over one axis: sqrt(sum x^2 + eps^2).
template <class T>
NodeP<T> l2_norm(NodeP<T> a, int axis, T eps = norm_guard_eps<T>()) {
  std::int64_t pre, n, post;
  detail::axis_extents(a->value.shape, axis, pre, n, post);
  Shape shape = a->value.shape;
  shape.erase(shape.begin() + axis);
  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(pre * post, [&](std::int64_t o) {
    const std::int64_t i = o / post, j = o % post;
    T acc = eps * eps;
    for (std::int64_t r = 0; r < n; ++r) {
      const T x = pa[(i * n + r) * post + j];
      acc += x * x;
    }
    pv[o] = std::sqrt(acc);
  });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, pre, n, post] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* ov = o->value.data();
      const T* va = na->value.data();
      detail::elementwise<T>(pre * post, [&](std::int64_t off) {
        const std::int64_t i = off / post, j = off % post;
        const T w = og[off] / ov[off];
        for (std::int64_t r = 0; r < n; ++r) {
          const std::int64_t at = (i * n + r) * post + j;
          g[at] += w * va[at];
        }
      });
    };
  }
  return out;
}

/// Guarded L2 norms over contiguous segments of the last axis. `offsets`
/// holds segment boundaries (offsets[0] = 0, offsets.back() = last dim).
/// Output replaces the last axis by the segment count.
template <class T>
NodeP<T> segment_l2_norm_last(NodeP<T> a, std::vector<std::int64_t> offsets,
                              T eps = norm_guard_eps<T>()) {
  check_arg(a->value.rank() >= 1, "segment_l2_norm_last: rank must be >= 1");
  check_arg(offsets.size() >= 2 && offsets.front() == 0 &&
                offsets.back() == a->value.shape.back(),
            "segment_l2_norm_last: offsets must span the last axis");
  const std::int64_t width = a->value.shape.back();
  const std::int64_t segs = static_cast<std::int64_t>(offsets.size()) - 1;
  const std::int64_t rows = a->value.numel() / std::max<std::int64_t>(width, 1);

  Shape shape = a->value.shape;
  shape.back() = segs;
  Tensor<T> v = Tensor<T>::zeros(shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(rows, [&](std::int64_t row) {
    const T* x = pa + row * width;
    T* y = pv + row * segs;
    for (std::int64_t s = 0; s < segs; ++s) {
      T acc = eps * eps;
      for (std::int64_t i = offsets[s]; i < offsets[s + 1]; ++i) acc += x[i] * x[i];
      y[s] = std::sqrt(acc);
    }
  });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, offsets = std::move(offsets), width, segs, rows] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* ov = o->value.data();
      const T* va = na->value.data();
      detail::elementwise<T>(rows, [&](std::int64_t row) {
        const T* x = va + row * width;
        T* gx = g + row * width;
        for (std::int64_t s = 0; s < segs; ++s) {
          const T w = og[row * segs + s] / ov[row * segs + s];
          for (std::int64_t i = offsets[s]; i < offsets[s + 1]; ++i) gx[i] += w * x[i];
        }
      });
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loss / regularization ops
// ---------------------------------------------------------------------------

template <class T>
NodeP<T> softmax_last(NodeP<T> a) {
  check_arg(a->value.rank() >= 1, "softmax_last: rank must be >= 1");
  const std::int64_t width = a->value.shape.back();
  const std::int64_t rows = a->value.numel() / std::max<std::int64_t>(width, 1);
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  T* pv = v.data();
  detail::elementwise<T>(rows, [&](std::int64_t row) {
    const T* x = pa + row * width;
    T* y = pv + row * width;
    T mx = x[0];
    for (std::int64_t i = 1; i < width; ++i) mx = std::max(mx, x[i]);
    T sum = T(0);
    for (std::int64_t i = 0; i < width; ++i) {
      y[i] = std::exp(x[i] - mx);
      sum += y[i];
    }
    for (std::int64_t i = 0; i < width; ++i) y[i] /= sum;
  });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, rows, width] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* y = o->value.data();
      detail::elementwise<T>(rows, [&](std::int64_t row) {
        const T* yr = y + row * width;
        const T* gr = og + row * width;
        T dot = T(0);
        for (std::int64_t i = 0; i < width; ++i) dot += gr[i] * yr[i];
        T* out_g = g + row * width;
        for (std::int64_t i = 0; i < width; ++i) out_g[i] += yr[i] * (gr[i] - dot);
      });
    };
  }
  return out;
}

/// Fused softmax + cross-entropy, mean over rows. logits may be rank >= 2
/// with classes on the last axis; labels has one entry per row.
template <class T>
NodeP<T> softmax_cross_entropy(NodeP<T> logits, std::vector<std::int32_t> labels) {
  check_arg(logits->value.rank() >= 2, "softmax_cross_entropy: logits rank must be >= 2");
  const std::int64_t width = logits->value.shape.back();
  const std::int64_t rows = logits->value.numel() / width;
  check_arg(static_cast<std::int64_t>(labels.size()) == rows,
            "softmax_cross_entropy: one label per row required");
  for (std::int32_t y : labels)
    check_arg(y >= 0 && y < width, "softmax_cross_entropy: label out of range");

  auto probs = std::make_shared<Tensor<T>>(Tensor<T>::zeros(logits->value.shape));
  const T* pa = logits->value.data();
  T* pp = probs->data();
  double loss = 0.0;
  for (std::int64_t row = 0; row < rows; ++row) {
    const T* x = pa + row * width;
    T* p = pp + row * width;
    T mx = x[0];
    for (std::int64_t i = 1; i < width; ++i) mx = std::max(mx, x[i]);
    double sum = 0.0;
    for (std::int64_t i = 0; i < width; ++i) sum += std::exp(static_cast<double>(x[i] - mx));
    const double lse = std::log(sum) + static_cast<double>(mx);
    for (std::int64_t i = 0; i < width; ++i)
      p[i] = static_cast<T>(std::exp(static_cast<double>(x[i]) - lse));
    loss += lse - static_cast<double>(x[labels[row]]);
  }
  Tensor<T> v = Tensor<T>::scalar(static_cast<T>(loss / static_cast<double>(rows)));
  auto out = detail::fresh<T>(std::move(v), {logits});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* nl = logits.get();
    out->backprop = [o, nl, probs, labels = std::move(labels), rows, width] {
      nl->ensure_grad();
      T* g = nl->grad.data();
      const T seed = o->grad.v[0] / static_cast<T>(rows);
      const T* p = probs->data();
      for (std::int64_t row = 0; row < rows; ++row) {
        for (std::int64_t i = 0; i < width; ++i) g[row * width + i] += seed * p[row * width + i];
        g[row * width + labels[row]] -= seed;
      }
    };
  }
  return out;
}

/// Inverted dropout with an externally supplied 0/1 mask.
template <class T>
NodeP<T> dropout(NodeP<T> a, std::shared_ptr<Tensor<T>> mask, T keep_prob) {
  check_arg(mask && mask->shape == a->value.shape, "dropout: mask shape mismatch");
  check_arg(keep_prob > T(0) && keep_prob <= T(1), "dropout: keep probability must be in (0, 1]");
  const T inv = T(1) / keep_prob;
  Tensor<T> v = Tensor<T>::zeros(a->value.shape);
  const T* pa = a->value.data();
  const T* pm = mask->data();
  T* pv = v.data();
  detail::elementwise<T>(v.numel(), [&](std::int64_t i) { pv[i] = pa[i] * pm[i] * inv; });
  auto out = detail::fresh<T>(std::move(v), {a});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* na = a.get();
    out->backprop = [o, na, mask, inv] {
      na->ensure_grad();
      T* g = na->grad.data();
      const T* og = o->grad.data();
      const T* pm = mask->data();
      detail::elementwise<T>(o->grad.numel(),
                             [&](std::int64_t i) { g[i] += og[i] * pm[i] * inv; });
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch normalization
// ---------------------------------------------------------------------------

/// Running statistics held outside the graph (they are state, not
/// parameters). Channel count equals the normalized tensor's last dimension.
template <class T>
struct BnStats {
  Tensor<T> mean;
  Tensor<T> var;

  static BnStats init(std::int64_t channels) {
    return {Tensor<T>::zeros({channels}), Tensor<T>::full({channels}, T(1))};
  }
};

/// Normalizes per channel (last axis) over all remaining axes. In training
/// mode uses batch statistics and, when `running` is non-null, folds them
/// into the running estimates with the given momentum.
template <class T>
NodeP<T> batchnorm(NodeP<T> x, NodeP<T> gamma, NodeP<T> beta, BnStats<T>* running, bool training,
                   T momentum = T(0.9), T eps = T(1e-5)) {
  check_arg(x->value.rank() >= 2, "batchnorm: input rank must be >= 2");
  const std::int64_t c = x->value.shape.back();
  const std::int64_t m = x->value.numel() / c;
  check_arg(gamma->value.shape == Shape{c} && beta->value.shape == Shape{c},
            "batchnorm: gamma/beta must have one entry per channel");
  check_arg(m >= 1, "batchnorm: empty batch");

  Tensor<T> mean({c}, std::vector<T>(static_cast<std::size_t>(c)));
  Tensor<T> var({c}, std::vector<T>(static_cast<std::size_t>(c)));
  if (training) {
    const T* px = x->value.data();
    detail::elementwise<T>(c, [&](std::int64_t ch) {
      double acc = 0.0;
      for (std::int64_t r = 0; r < m; ++r) acc += static_cast<double>(px[r * c + ch]);
      const double mu = acc / static_cast<double>(m);
      double vacc = 0.0;
      for (std::int64_t r = 0; r < m; ++r) {
        const double d = static_cast<double>(px[r * c + ch]) - mu;
        vacc += d * d;
      }
      mean.v[ch] = static_cast<T>(mu);
      var.v[ch] = static_cast<T>(vacc / static_cast<double>(m));
    });
    if (running) {
      for (std::int64_t ch = 0; ch < c; ++ch) {
        running->mean.v[ch] = momentum * running->mean.v[ch] + (T(1) - momentum) * mean.v[ch];
        running->var.v[ch] = momentum * running->var.v[ch] + (T(1) - momentum) * var.v[ch];
      }
    }
  } else {
    check_arg(running != nullptr, "batchnorm: inference mode requires running statistics");
    mean = running->mean;
    var = running->var;
  }

  auto inv_std = std::make_shared<Tensor<T>>(Tensor<T>::zeros(Shape{c}));
  for (std::int64_t ch = 0; ch < c; ++ch)
    inv_std->v[ch] = T(1) / std::sqrt(var.v[ch] + eps);

  auto xhat = std::make_shared<Tensor<T>>(Tensor<T>::zeros(x->value.shape));
  {
    const T* px = x->value.data();
    T* ph = xhat->data();
    const T* pm = mean.data();
    const T* pis = inv_std->data();
    detail::elementwise<T>(m * c, [&](std::int64_t i) {
      const std::int64_t ch = i % c;
      ph[i] = (px[i] - pm[ch]) * pis[ch];
    });
  }

  Tensor<T> v = Tensor<T>::zeros(x->value.shape);
  {
    const T* ph = xhat->data();
    const T* pg = gamma->value.data();
    const T* pb = beta->value.data();
    T* pv = v.data();
    detail::elementwise<T>(m * c, [&](std::int64_t i) {
      const std::int64_t ch = i % c;
      pv[i] = pg[ch] * ph[i] + pb[ch];
    });
  }

  auto out = detail::fresh<T>(std::move(v), {x, gamma, beta});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* nx = x.get();
    Node<T>* ng = gamma.get();
    Node<T>* nb = beta.get();
    out->backprop = [o, nx, ng, nb, xhat, inv_std, training, m, c] {
      const T* og = o->grad.data();
      const T* ph = xhat->data();
      // Channel sums of g and g*xhat feed dgamma/dbeta and, in training
      // mode, the correction terms from the batch statistics.
      std::vector<T> sum_g(static_cast<std::size_t>(c), T(0));
      std::vector<T> sum_gh(static_cast<std::size_t>(c), T(0));
      detail::elementwise<T>(c, [&](std::int64_t ch) {
        T a = T(0), b = T(0);
        for (std::int64_t r = 0; r < m; ++r) {
          const T g = og[r * c + ch];
          a += g;
          b += g * ph[r * c + ch];
        }
        sum_g[ch] = a;
        sum_gh[ch] = b;
      });
      if (ng->requires_grad) {
        ng->ensure_grad();
        for (std::int64_t ch = 0; ch < c; ++ch) ng->grad.v[ch] += sum_gh[ch];
      }
      if (nb->requires_grad) {
        nb->ensure_grad();
        for (std::int64_t ch = 0; ch < c; ++ch) nb->grad.v[ch] += sum_g[ch];
      }
      if (nx->requires_grad) {
        nx->ensure_grad();
        T* gx = nx->grad.data();
        const T* pg = ng->value.data();
        const T* pis = inv_std->data();
        const T invm = T(1) / static_cast<T>(m);
        if (training) {
          detail::elementwise<T>(m * c, [&](std::int64_t i) {
            const std::int64_t ch = i % c;
            gx[i] += pg[ch] * pis[ch] *
                     (og[i] - sum_g[ch] * invm - ph[i] * sum_gh[ch] * invm);
          });
        } else {
          detail::elementwise<T>(m * c, [&](std::int64_t i) {
            const std::int64_t ch = i % c;
            gx[i] += pg[ch] * pis[ch] * og[i];
          });
        }
      }
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Patch convolution
// ---------------------------------------------------------------------------

/// Patch tables for a batch: per sample, row q lists the k patch members of
/// point q; inverse adjacency in CSR form mirrors cloud::PatchIndex, with
/// sample blocks packed back to back (offsets indexed by sample*n + point).
struct BatchPatches {
  int batch = 0;
  std::int64_t n = 0;
  int k = 0;
  std::vector<std::int32_t> idx;                                   // batch*n*k
  std::vector<std::int64_t> inv_offsets;                           // batch*n + 1
  std::vector<std::pair<std::int32_t, std::int32_t>> inv_entries;  // (q, slot) within sample
};

/// The convolution gather: out[b,q,j,c] = sum_s f[b, idx[b,q,s], j] *
/// kernel[b,q,s,c]. The kernel tensor carries the extension weights folded
/// into the basis values; it is a constant of the graph (positions are not
/// learned), so no gradient flows into it.
template <class T>
NodeP<T> patch_conv(NodeP<T> f, std::shared_ptr<Tensor<T>> kernel,
                    std::shared_ptr<BatchPatches> patches) {
  check_arg(f->value.rank() == 3, "patch_conv: features must be [batch, points, channels]");
  const std::int64_t b = f->value.dim(0), n = f->value.dim(1), j = f->value.dim(2);
  check_arg(patches && patches->batch == b && patches->n == n, "patch_conv: patch table mismatch");
  const int k = patches->k;
  check_arg(kernel && kernel->rank() == 4 && kernel->dim(0) == b && kernel->dim(1) == n &&
                kernel->dim(2) == k,
            "patch_conv: kernel tensor must be [batch, points, k, basis]");
  const std::int64_t q = kernel->dim(3);

  Tensor<T> v = Tensor<T>::zeros({b, n, j, q});
  {
    const T* pf = f->value.data();
    const T* pk = kernel->data();
    const std::int32_t* pi = patches->idx.data();
    T* pv = v.data();
#pragma omp parallel
    {
      RowMat<T> scratch(k, j);
#pragma omp for schedule(static)
      for (std::int64_t bq = 0; bq < b * n; ++bq) {
        const std::int64_t bi = bq / n;
        const T* fb = pf + bi * n * j;
        const std::int32_t* row = pi + bq * k;
        for (int s = 0; s < k; ++s)
          scratch.row(s) = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(
              fb + static_cast<std::int64_t>(row[s]) * j, j);
        CMatMap<T> K(pk + bq * k * q, k, q);
        MatMap<T> O(pv + bq * j * q, j, q);
        O.noalias() = scratch.transpose() * K;
      }
    }
  }

  auto out = detail::fresh<T>(std::move(v), {f});
  if (out->requires_grad) {
    Node<T>* o = out.get();
    Node<T>* nf = f.get();
    out->backprop = [o, nf, kernel, patches, b, n, j, q] {
      nf->ensure_grad();
      const int k = patches->k;
      const T* og = o->grad.data();
      const T* pk = kernel->data();
      T* gf = nf->grad.data();
      // Inverse adjacency: each input row is owned by one iteration, so the
      // loop parallelizes without atomics and sums in a fixed order.
#pragma omp parallel for schedule(static)
      for (std::int64_t bi_pt = 0; bi_pt < b * n; ++bi_pt) {
        const std::int64_t bi = bi_pt / n;
        Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> grow(gf + bi_pt * j, j);
        for (std::int64_t e = patches->inv_offsets[bi_pt]; e < patches->inv_offsets[bi_pt + 1];
             ++e) {
          const auto [qq, slot] = patches->inv_entries[e];
          const std::int64_t bq = bi * n + qq;
          CMatMap<T> G(og + bq * j * q, j, q);
          Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> kv(
              pk + (bq * k + slot) * q, q);
          grow.noalias() += G * kv;
        }
      }
    };
  }
  return out;
}

}  // namespace sphnet::ad

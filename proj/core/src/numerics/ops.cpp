// Copyright 2026 The AIVA Authors
// SPDX-License-Identifier: Apache-2.0

#include "aiva/numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace aiva::num {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapC = Eigen::Map<const RowMat<T>>;
template <typename T>
using MapM = Eigen::Map<RowMat<T>>;

template <typename T>
MapC<T> as_mat(const Tensor<T>& t) {
  return MapC<T>(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}
template <typename T>
MapM<T> as_mat(Tensor<T>& t) {
  return MapM<T>(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

// View of a tensor as [outer × extent × inner] around one axis.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_str(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

void require_same_graph(const char* op, const auto& a, const auto& b) {
  if (&a.graph() != &b.graph()) throw ValueError(std::string(op) + ": operands belong to different graphs");
}

void require_same_shape(const char* op, const Shape& a, const Shape& b) {
  if (a != b) throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

void require_matrix(const char* op, const Shape& s) {
  if (s.size() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_str(s));
}

template <typename T>
void axpy(Tensor<T>& dst, const Tensor<T>& src, T alpha = T{1}) {
  T* d = dst.data();
  const T* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += alpha * s[i];
}

template <typename T>
T gelu_value(T x) {
  return T(0.5) * x * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
}

template <typename T>
T gelu_slope(T x) {
  const T cdf = T(0.5) * (T(1) + std::erf(x / std::numbers::sqrt2_v<T>));
  const T pdf = std::exp(T(-0.5) * x * x) * std::numbers::inv_sqrtpi_v<T> / std::numbers::sqrt2_v<T>;
  return cdf + x * pdf;
}

template <typename T>
Tensor<T> softmax_values(const Tensor<T>& x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  Tensor<T> y(x.shape());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.extent * s.inner + in;
      T mx = x[base];
      for (std::size_t k = 1; k < s.extent; ++k) mx = std::max(mx, x[base + k * s.inner]);
      T total = 0;
      for (std::size_t k = 0; k < s.extent; ++k) {
        const T e = std::exp(x[base + k * s.inner] - mx);
        y[base + k * s.inner] = e;
        total += e;
      }
      for (std::size_t k = 0; k < s.extent; ++k) y[base + k * s.inner] /= total;
    }
  }
  return y;
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_matrix("matmul", a.shape());
  require_matrix("matmul", b.shape());
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: inner dimensions disagree for " + shape_str(a.shape()) + " and " + shape_str(b.shape()));
  }
  Tensor<T> c(Shape{a.rows(), b.cols()});
  as_mat(c).noalias() = as_mat(a) * as_mat(b);
  return c;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  auto y = softmax_values(x, axis);
  check_finite(y, "softmax");
  return y;
}

template <typename T>
Var<T> matmul(Var<T> a, Var<T> b) {
  require_same_graph("matmul", a, b);
  Graph<T>& g = a.graph();
  Tensor<T> out = matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return g.push(OpKind::kMatMul, {ia, ib}, std::move(out), [ia, ib](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = *g.grad(self);
    if (Tensor<T>* da = g.grad_sink(ia)) as_mat(*da).noalias() += as_mat(dc) * as_mat(g.value(ib)).transpose();
    if (Tensor<T>* db = g.grad_sink(ib)) as_mat(*db).noalias() += as_mat(g.value(ia)).transpose() * as_mat(dc);
  });
}

template <typename T>
Var<T> add(Var<T> a, Var<T> b) {
  require_same_graph("add", a, b);
  require_same_shape("add", a.shape(), b.shape());
  Tensor<T> out = a.value();
  axpy(out, b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().push(OpKind::kAdd, {ia, ib}, std::move(out), [ia, ib](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = *g.grad(self);
    if (Tensor<T>* da = g.grad_sink(ia)) axpy(*da, dc);
    if (Tensor<T>* db = g.grad_sink(ib)) axpy(*db, dc);
  });
}

template <typename T>
Var<T> sub(Var<T> a, Var<T> b) {
  require_same_graph("sub", a, b);
  require_same_shape("sub", a.shape(), b.shape());
  Tensor<T> out = a.value();
  axpy(out, b.value(), T{-1});
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().push(OpKind::kSub, {ia, ib}, std::move(out), [ia, ib](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = *g.grad(self);
    if (Tensor<T>* da = g.grad_sink(ia)) axpy(*da, dc);
    if (Tensor<T>* db = g.grad_sink(ib)) axpy(*db, dc, T{-1});
  });
}

template <typename T>
Var<T> mul(Var<T> a, Var<T> b) {
  require_same_graph("mul", a, b);
  require_same_shape("mul", a.shape(), b.shape());
  Tensor<T> out = a.value();
  const Tensor<T>& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.graph().push(OpKind::kMul, {ia, ib}, std::move(out), [ia, ib](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = *g.grad(self);
    if (Tensor<T>* da = g.grad_sink(ia)) {
      const Tensor<T>& bv = g.value(ib);
      for (std::size_t i = 0; i < dc.size(); ++i) (*da)[i] += dc[i] * bv[i];
    }
    if (Tensor<T>* db = g.grad_sink(ib)) {
      const Tensor<T>& av = g.value(ia);
      for (std::size_t i = 0; i < dc.size(); ++i) (*db)[i] += dc[i] * av[i];
    }
  });
}

template <typename T>
Var<T> scale(Var<T> a, std::type_identity_t<T> factor) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v *= factor;
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kScale, {ia}, std::move(out), [ia, factor](Graph<T>& g, std::size_t self) {
    if (Tensor<T>* da = g.grad_sink(ia)) axpy(*da, *g.grad(self), factor);
  });
}

template <typename T>
Var<T> add_scalar(Var<T> a, std::type_identity_t<T> offset) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v += offset;
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kAddScalar, {ia}, std::move(out), [ia](Graph<T>& g, std::size_t self) {
    if (Tensor<T>* da = g.grad_sink(ia)) axpy(*da, *g.grad(self));
  });
}

template <typename T>
Var<T> add_bias(Var<T> x, Var<T> b) {
  require_same_graph("add_bias", x, b);
  require_matrix("add_bias", x.shape());
  const std::size_t n = x.value().cols();
  if (b.value().size() != n || b.value().rank() > 2 || (b.value().rank() == 2 && b.value().rows() != 1)) {
    throw ShapeError("add_bias: bias " + shape_str(b.shape()) + " does not fit rows of " + shape_str(x.shape()));
  }
  Tensor<T> out = x.value();
  const Tensor<T>& bv = b.value();
  const std::size_t m = out.rows();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] += bv[c];
  const std::size_t ix = x.id(), ib = b.id();
  return x.graph().push(OpKind::kAddBias, {ix, ib}, std::move(out), [ix, ib, m, n](Graph<T>& g, std::size_t self) {
    const Tensor<T>& dc = *g.grad(self);
    if (Tensor<T>* dx = g.grad_sink(ix)) axpy(*dx, dc);
    if (Tensor<T>* db = g.grad_sink(ib)) {
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < n; ++c) (*db)[c] += dc[r * n + c];
    }
  });
}

template <typename T>
Var<T> transpose(Var<T> a) {
  require_matrix("transpose", a.shape());
  const Tensor<T>& av = a.value();
  Tensor<T> out(Shape{av.cols(), av.rows()});
  as_mat(out) = as_mat(av).transpose();
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kTranspose, {ia}, std::move(out), [ia](Graph<T>& g, std::size_t self) {
    if (Tensor<T>* da = g.grad_sink(ia)) as_mat(*da) += as_mat(*g.grad(self)).transpose();
  });
}

template <typename T>
Var<T> concat(std::span<const Var<T>> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Graph<T>& g = parts.front().graph();
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) throw ShapeError("concat: axis out of range for " + shape_str(first));
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> extents;
  for (const Var<T>& p : parts) {
    require_same_graph("concat", parts.front(), p);
    const Shape& s = p.shape();
    bool compatible = s.size() == first.size();
    for (std::size_t i = 0; compatible && i < s.size(); ++i) compatible = i == axis || s[i] == first[i];
    if (!compatible) throw ShapeError("concat: incompatible shapes " + shape_str(first) + " and " + shape_str(s));
    out_shape[axis] += s[axis];
    ids.push_back(p.id());
    extents.push_back(s[axis]);
  }
  const AxisSplit os = split_at(out_shape, axis);
  Tensor<T> out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = parts[k].value();
    const std::size_t block = extents[k] * os.inner;
    for (std::size_t o = 0; o < os.outer; ++o) {
      std::copy_n(v.data() + o * block, block, out.data() + o * os.extent * os.inner + offset * os.inner);
    }
    offset += extents[k];
  }
  auto in_ids = ids;
  return g.push(OpKind::kConcat, std::move(in_ids), std::move(out),
                [ids, extents, os](Graph<T>& g, std::size_t self) {
                  const Tensor<T>& dc = *g.grad(self);
                  std::size_t offset = 0;
                  for (std::size_t k = 0; k < ids.size(); ++k) {
                    const std::size_t block = extents[k] * os.inner;
                    if (Tensor<T>* dp = g.grad_sink(ids[k])) {
                      for (std::size_t o = 0; o < os.outer; ++o) {
                        const T* src = dc.data() + o * os.extent * os.inner + offset * os.inner;
                        T* dst = dp->data() + o * block;
                        for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
                      }
                    }
                    offset += extents[k];
                  }
                });
}

template <typename T>
Var<T> slice(Var<T> a, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& in_shape = a.shape();
  const AxisSplit s = split_at(in_shape, axis);
  if (length == 0 || start + length > s.extent) {
    throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                     ") exceeds axis extent of " + shape_str(in_shape));
  }
  Shape out_shape = in_shape;
  out_shape[axis] = length;
  Tensor<T> out(out_shape);
  const Tensor<T>& av = a.value();
  const std::size_t block = length * s.inner;
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(av.data() + o * s.extent * s.inner + start * s.inner, block, out.data() + o * block);
  }
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kSlice, {ia}, std::move(out), [ia, s, start, block](Graph<T>& g, std::size_t self) {
    Tensor<T>* da = g.grad_sink(ia);
    if (!da) return;
    const Tensor<T>& dc = *g.grad(self);
    for (std::size_t o = 0; o < s.outer; ++o) {
      T* dst = da->data() + o * s.extent * s.inner + start * s.inner;
      const T* src = dc.data() + o * block;
      for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
    }
  });
}

template <typename T>
Var<T> sum(Var<T> a) {
  T total = 0;
  for (T v : a.value().values()) total += v;
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kSum, {ia}, Tensor<T>::scalar(total), [ia](Graph<T>& g, std::size_t self) {
    Tensor<T>* da = g.grad_sink(ia);
    if (!da) return;
    const T d = g.grad(self)->item();
    for (auto& v : da->values()) v += d;
  });
}

template <typename T>
Var<T> mean(Var<T> a, std::size_t axis) {
  const AxisSplit s = split_at(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape[axis] = 1;
  Tensor<T> out(out_shape);
  const Tensor<T>& av = a.value();
  const T inv = T(1) / static_cast<T>(s.extent);
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t in = 0; in < s.inner; ++in) {
      T total = 0;
      for (std::size_t k = 0; k < s.extent; ++k) total += av[(o * s.extent + k) * s.inner + in];
      out[o * s.inner + in] = total * inv;
    }
  const std::size_t ia = a.id();
  return a.graph().push(OpKind::kMean, {ia}, std::move(out), [ia, s, inv](Graph<T>& g, std::size_t self) {
    Tensor<T>* da = g.grad_sink(ia);
    if (!da) return;
    const Tensor<T>& dc = *g.grad(self);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t in = 0; in < s.inner; ++in) {
        const T d = dc[o * s.inner + in] * inv;
        for (std::size_t k = 0; k < s.extent; ++k) (*da)[(o * s.extent + k) * s.inner + in] += d;
      }
  });
}

template <typename T>
Var<T> softmax(Var<T> x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  Tensor<T> out = softmax_values(x.value(), axis);
  const std::size_t ix = x.id();
  return x.graph().push(OpKind::kSoftmax, {ix}, std::move(out), [ix, s](Graph<T>& g, std::size_t self) {
    Tensor<T>* dx = g.grad_sink(ix);
    if (!dx) return;
    const Tensor<T>& y = g.value(self);
    const Tensor<T>& dy = *g.grad(self);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.extent * s.inner + in;
        T dot = 0;
        for (std::size_t k = 0; k < s.extent; ++k) dot += dy[base + k * s.inner] * y[base + k * s.inner];
        for (std::size_t k = 0; k < s.extent; ++k) {
          const std::size_t i = base + k * s.inner;
          (*dx)[i] += y[i] * (dy[i] - dot);
        }
      }
  });
}

template <typename T>
Var<T> log_softmax(Var<T> x, std::size_t axis) {
  const AxisSplit s = split_at(x.shape(), axis);
  const Tensor<T>& xv = x.value();
  Tensor<T> out(xv.shape());
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t in = 0; in < s.inner; ++in) {
      const std::size_t base = o * s.extent * s.inner + in;
      T mx = xv[base];
      for (std::size_t k = 1; k < s.extent; ++k) mx = std::max(mx, xv[base + k * s.inner]);
      T total = 0;
      for (std::size_t k = 0; k < s.extent; ++k) total += std::exp(xv[base + k * s.inner] - mx);
      const T lse = mx + std::log(total);
      for (std::size_t k = 0; k < s.extent; ++k) out[base + k * s.inner] = xv[base + k * s.inner] - lse;
    }
  const std::size_t ix = x.id();
  return x.graph().push(OpKind::kLogSoftmax, {ix}, std::move(out), [ix, s](Graph<T>& g, std::size_t self) {
    Tensor<T>* dx = g.grad_sink(ix);
    if (!dx) return;
    const Tensor<T>& y = g.value(self);
    const Tensor<T>& dy = *g.grad(self);
    for (std::size_t o = 0; o < s.outer; ++o)
      for (std::size_t in = 0; in < s.inner; ++in) {
        const std::size_t base = o * s.extent * s.inner + in;
        T total = 0;
        for (std::size_t k = 0; k < s.extent; ++k) total += dy[base + k * s.inner];
        for (std::size_t k = 0; k < s.extent; ++k) {
          const std::size_t i = base + k * s.inner;
          (*dx)[i] += dy[i] - std::exp(y[i]) * total;
        }
      }
  });
}

template <typename T>
Var<T> layer_norm(Var<T> x, Var<T> gain, Var<T> bias, std::type_identity_t<T> eps) {
  require_same_graph("layer_norm", x, gain);
  require_same_graph("layer_norm", x, bias);
  const Tensor<T>& xv = x.value();
  const std::size_t n = xv.shape().back();
  const std::size_t rows = xv.size() / n;
  if (gain.value().size() != n || bias.value().size() != n) {
    throw ShapeError("layer_norm: gain/bias " + shape_str(gain.shape()) + "/" + shape_str(bias.shape()) +
                     " do not match last axis of " + shape_str(xv.shape()));
  }
  const Tensor<T>& gv = gain.value();
  const Tensor<T>& bv = bias.value();
  Tensor<T> out(xv.shape());
  // Normalized activations and inverse deviations are kept for backward.
  auto xhat = std::make_shared<std::vector<T>>(xv.size());
  auto inv_std = std::make_shared<std::vector<T>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = xv.data() + r * n;
    T mu = 0;
    for (std::size_t c = 0; c < n; ++c) mu += row[c];
    mu /= static_cast<T>(n);
    T var = 0;
    for (std::size_t c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= static_cast<T>(n);
    const T is = T(1) / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < n; ++c) {
      const T h = (row[c] - mu) * is;
      (*xhat)[r * n + c] = h;
      out[r * n + c] = h * gv[c] + bv[c];
    }
  }
  const std::size_t ix = x.id(), ig = gain.id(), ib = bias.id();
  return x.graph().push(OpKind::kLayerNorm, {ix, ig, ib}, std::move(out),
                        [ix, ig, ib, n, rows, xhat, inv_std](Graph<T>& g, std::size_t self) {
                          const Tensor<T>& dy = *g.grad(self);
                          const Tensor<T>& gv = g.value(ig);
                          if (Tensor<T>* dg = g.grad_sink(ig)) {
                            for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t c = 0; c < n; ++c) (*dg)[c] += dy[r * n + c] * (*xhat)[r * n + c];
                          }
                          if (Tensor<T>* db = g.grad_sink(ib)) {
                            for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t c = 0; c < n; ++c) (*db)[c] += dy[r * n + c];
                          }
                          if (Tensor<T>* dx = g.grad_sink(ix)) {
                            const T inv_n = T(1) / static_cast<T>(n);
                            for (std::size_t r = 0; r < rows; ++r) {
                              T mean_dh = 0, mean_dh_h = 0;
                              for (std::size_t c = 0; c < n; ++c) {
                                const T dh = dy[r * n + c] * gv[c];
                                mean_dh += dh;
                                mean_dh_h += dh * (*xhat)[r * n + c];
                              }
                              mean_dh *= inv_n;
                              mean_dh_h *= inv_n;
                              for (std::size_t c = 0; c < n; ++c) {
                                const T dh = dy[r * n + c] * gv[c];
                                (*dx)[r * n + c] +=
                                    (*inv_std)[r] * (dh - mean_dh - (*xhat)[r * n + c] * mean_dh_h);
                              }
                            }
                          }
                        });
}

template <typename T>
Var<T> gelu(Var<T> x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v = gelu_value(v);
  const std::size_t ix = x.id();
  return x.graph().push(OpKind::kGelu, {ix}, std::move(out), [ix](Graph<T>& g, std::size_t self) {
    Tensor<T>* dx = g.grad_sink(ix);
    if (!dx) return;
    const Tensor<T>& xv = g.value(ix);
    const Tensor<T>& dy = *g.grad(self);
    for (std::size_t i = 0; i < dy.size(); ++i) (*dx)[i] += dy[i] * gelu_slope(xv[i]);
  });
}

template <typename T>
Var<T> relu(Var<T> x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v = std::max(v, T{0});
  const std::size_t ix = x.id();
  return x.graph().push(OpKind::kRelu, {ix}, std::move(out), [ix](Graph<T>& g, std::size_t self) {
    Tensor<T>* dx = g.grad_sink(ix);
    if (!dx) return;
    const Tensor<T>& xv = g.value(ix);
    const Tensor<T>& dy = *g.grad(self);
    for (std::size_t i = 0; i < dy.size(); ++i)
      if (xv[i] > T{0}) (*dx)[i] += dy[i];
  });
}

template <typename T>
Var<T> l2_normalize(Var<T> x) {
  const Tensor<T>& xv = x.value();
  const std::size_t n = xv.shape().back();
  const std::size_t rows = xv.size() / n;
  Tensor<T> out(xv.shape());
  auto norms = std::make_shared<std::vector<T>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    T sq = 0;
    for (std::size_t c = 0; c < n; ++c) sq += xv[r * n + c] * xv[r * n + c];
    if (!(sq > T{0})) throw NumericError("l2_normalize: row " + std::to_string(r) + " is the zero vector");
    const T norm = std::sqrt(sq);
    (*norms)[r] = norm;
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = xv[r * n + c] / norm;
  }
  const std::size_t ix = x.id();
  return x.graph().push(OpKind::kL2Normalize, {ix}, std::move(out), [ix, n, rows, norms](Graph<T>& g, std::size_t self) {
    Tensor<T>* dx = g.grad_sink(ix);
    if (!dx) return;
    const Tensor<T>& y = g.value(self);
    const Tensor<T>& dy = *g.grad(self);
    for (std::size_t r = 0; r < rows; ++r) {
      T dot = 0;
      for (std::size_t c = 0; c < n; ++c) dot += y[r * n + c] * dy[r * n + c];
      for (std::size_t c = 0; c < n; ++c)
        (*dx)[r * n + c] += (dy[r * n + c] - y[r * n + c] * dot) / (*norms)[r];
    }
  });
}

template <typename T>
Var<T> embedding(Var<T> table, std::span<const std::int32_t> ids) {
  require_matrix("embedding", table.shape());
  const Tensor<T>& tv = table.value();
  const std::size_t vocab = tv.rows(), d = tv.cols();
  if (ids.empty()) throw ShapeError("embedding: empty id sequence");
  for (std::int32_t id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw ValueError("embedding: id " + std::to_string(id) + " out of range for vocabulary of " +
                       std::to_string(vocab));
    }
  }
  Tensor<T> out(Shape{ids.size(), d});
  for (std::size_t i = 0; i < ids.size(); ++i) std::copy_n(tv.data() + ids[i] * d, d, out.data() + i * d);
  std::vector<std::int32_t> kept(ids.begin(), ids.end());
  const std::size_t it = table.id();
  return table.graph().push(OpKind::kEmbedding, {it}, std::move(out),
                            [it, d, kept = std::move(kept)](Graph<T>& g, std::size_t self) {
                              Tensor<T>* dt = g.grad_sink(it);
                              if (!dt) return;
                              const Tensor<T>& dy = *g.grad(self);
                              for (std::size_t i = 0; i < kept.size(); ++i) {
                                T* dst = dt->data() + static_cast<std::size_t>(kept[i]) * d;
                                for (std::size_t c = 0; c < d; ++c) dst[c] += dy[i * d + c];
                              }
                            });
}

template <typename T>
Var<T> nll_from_probs(Var<T> probs, std::span<const std::int32_t> labels) {
  require_matrix("nll_from_probs", probs.shape());
  const Tensor<T>& pv = probs.value();
  const std::size_t n = pv.rows(), c = pv.cols();
  if (labels.size() != n) {
    throw ShapeError("nll_from_probs: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " rows");
  }
  constexpr T kFloor = T(1e-12);
  T total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw ValueError("nll_from_probs: label " + std::to_string(labels[i]) + " out of range for " +
                       std::to_string(c) + " classes");
    }
    total -= std::log(std::max(pv.at(i, labels[i]), kFloor));
  }
  std::vector<std::int32_t> kept(labels.begin(), labels.end());
  const std::size_t ip = probs.id();
  return probs.graph().push(OpKind::kNllFromProbs, {ip}, Tensor<T>::scalar(total),
                            [ip, c, kept = std::move(kept)](Graph<T>& g, std::size_t self) {
                              Tensor<T>* dp = g.grad_sink(ip);
                              if (!dp) return;
                              const T d = g.grad(self)->item();
                              const Tensor<T>& pv = g.value(ip);
                              for (std::size_t i = 0; i < kept.size(); ++i) {
                                const T p = pv[i * c + kept[i]];
                                if (p > kFloor) (*dp)[i * c + kept[i]] -= d / p;
                              }
                            });
}

#define AIVA_INSTANTIATE_OPS(T)                                                       \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> softmax<T>(const Tensor<T>&, std::size_t);                       \
  template Var<T> matmul<T>(Var<T>, Var<T>);                                          \
  template Var<T> add<T>(Var<T>, Var<T>);                                             \
  template Var<T> sub<T>(Var<T>, Var<T>);                                             \
  template Var<T> mul<T>(Var<T>, Var<T>);                                             \
  template Var<T> scale<T>(Var<T>, T);                                                \
  template Var<T> add_scalar<T>(Var<T>, T);                                           \
  template Var<T> add_bias<T>(Var<T>, Var<T>);                                        \
  template Var<T> transpose<T>(Var<T>);                                               \
  template Var<T> concat<T>(std::span<const Var<T>>, std::size_t);                    \
  template Var<T> slice<T>(Var<T>, std::size_t, std::size_t, std::size_t);            \
  template Var<T> sum<T>(Var<T>);                                                     \
  template Var<T> mean<T>(Var<T>, std::size_t);                                       \
  template Var<T> softmax<T>(Var<T>, std::size_t);                                    \
  template Var<T> log_softmax<T>(Var<T>, std::size_t);                                \
  template Var<T> layer_norm<T>(Var<T>, Var<T>, Var<T>, T);                           \
  template Var<T> gelu<T>(Var<T>);                                                    \
  template Var<T> relu<T>(Var<T>);                                                    \
  template Var<T> l2_normalize<T>(Var<T>);                                            \
  template Var<T> embedding<T>(Var<T>, std::span<const std::int32_t>);                \
  template Var<T> nll_from_probs<T>(Var<T>, std::span<const std::int32_t>);

AIVA_INSTANTIATE_OPS(float)
AIVA_INSTANTIATE_OPS(double)

#undef AIVA_INSTANTIATE_OPS

}  // namespace aiva::num

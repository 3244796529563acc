#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace legalie::genix {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using ColVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Row-vector parameters (biases, norm gains) are stored as 1 x n matrices so
// every tensor has the same type.
template <typename T>
struct Linear {
  Mat<T> w;  // in x out
  Mat<T> b;  // 1 x out
};

template <typename T>
struct Norm {
  Mat<T> g;
  Mat<T> b;
};

template <typename T>
struct Attention {
  Linear<T> q, k, v, o;
};

template <typename T>
Mat<T> linear_fwd(const Linear<T>& p, const Mat<T>& x) {
  Mat<T> y = x * p.w;
  y.rowwise() += p.b.row(0);
  return y;
}

template <typename T>
Mat<T> linear_bwd(const Linear<T>& p, Linear<T>& grad, const Mat<T>& x, const Mat<T>& dy) {
  grad.w.noalias() += x.transpose() * dy;
  grad.b += dy.colwise().sum();
  return dy * p.w.transpose();
}

// ---- layer norm ----

template <typename T>
struct NormCache {
  Mat<T> xhat;
  ColVec<T> rstd;
};

template <typename T>
Mat<T> norm_fwd(const Norm<T>& p, const Mat<T>& x, NormCache<T>* cache) {
  constexpr T eps = T(1e-5);
  const auto rows = x.rows(), cols = x.cols();
  Mat<T> xhat(rows, cols);
  ColVec<T> rstd(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    T mu = x.row(r).mean();
    auto centered = (x.row(r).array() - mu).eval();
    T var = centered.square().mean();
    rstd(r) = T(1) / std::sqrt(var + eps);
    xhat.row(r) = centered * rstd(r);
  }
  Mat<T> y = xhat.array().rowwise() * p.g.row(0).array();
  y.rowwise() += p.b.row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->rstd = std::move(rstd);
  }
  return y;
}

template <typename T>
Mat<T> norm_bwd(const Norm<T>& p, Norm<T>& grad, const NormCache<T>& c, const Mat<T>& dy) {
  grad.g += (dy.array() * c.xhat.array()).colwise().sum().matrix();
  grad.b += dy.colwise().sum();
  Mat<T> dxhat = dy.array().rowwise() * p.g.row(0).array();
  Mat<T> dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    T m1 = dxhat.row(r).mean();
    T m2 = (dxhat.row(r).array() * c.xhat.row(r).array()).mean();
    dx.row(r) = c.rstd(r) * (dxhat.row(r).array() - m1 - c.xhat.row(r).array() * m2);
  }
  return dx;
}

// ---- GELU (tanh approximation) ----

template <typename T>
Mat<T> gelu_fwd(const Mat<T>& x) {
  const T c = T(0.7978845608028654);
  auto v = x.array();
  return (T(0.5) * v * (T(1) + (c * (v + T(0.044715) * v.cube())).tanh())).matrix();
}

template <typename T>
Mat<T> gelu_bwd(const Mat<T>& x, const Mat<T>& dy) {
  const T c = T(0.7978845608028654);
  auto v = x.array();
  Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t = (c * (v + T(0.044715) * v.cube())).tanh();
  return (dy.array() *
          (T(0.5) * (T(1) + t) + T(0.5) * v * (T(1) - t.square()) * c * (T(1) + T(3 * 0.044715) * v.square())))
      .matrix();
}

// ---- softmax ----

template <typename T>
void softmax_rows(Mat<T>& s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    T mx = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - mx).exp();
    s.row(r) /= s.row(r).sum();
  }
}

// ---- multi-head attention ----

template <typename T>
struct AttnCache {
  Mat<T> xq, xkv, q, k, v, o;
  std::vector<Mat<T>> probs;  // per head, Lq x Lk
};

template <typename T>
Mat<T> attn_fwd(const Attention<T>& a, const Mat<T>& xq, const Mat<T>& xkv, int heads, bool causal,
                AttnCache<T>* cache) {
  const auto d = a.q.w.cols();
  const auto dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Mat<T> q = linear_fwd(a.q, xq);
  Mat<T> k = linear_fwd(a.k, xkv);
  Mat<T> v = linear_fwd(a.v, xkv);
  Mat<T> o(xq.rows(), d);
  std::vector<Mat<T>> probs;
  if (cache) probs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Mat<T> s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
    if (causal)
      for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = i + 1; j < s.cols(); ++j) s(i, j) = -std::numeric_limits<T>::infinity();
    softmax_rows(s);
    o.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
    if (cache) probs.push_back(std::move(s));
  }
  Mat<T> y = linear_fwd(a.o, o);
  if (cache) {
    cache->xq = xq;
    cache->xkv = xkv;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->o = std::move(o);
    cache->probs = std::move(probs);
  }
  return y;
}

template <typename T>
struct AttnGrads {
  Mat<T> dxq;
  Mat<T> dxkv;
};

template <typename T>
AttnGrads<T> attn_bwd(const Attention<T>& a, Attention<T>& grad, const AttnCache<T>& c, int heads, const Mat<T>& dy) {
  const auto d = a.q.w.cols();
  const auto dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Mat<T> d_o = linear_bwd(a.o, grad.o, c.o, dy);
  Mat<T> dq(c.q.rows(), d), dk(c.k.rows(), d), dv(c.v.rows(), d);
  for (int h = 0; h < heads; ++h) {
    const Mat<T>& p = c.probs[static_cast<std::size_t>(h)];
    auto doh = d_o.middleCols(h * dh, dh);
    Mat<T> dp = doh * c.v.middleCols(h * dh, dh).transpose();
    dv.middleCols(h * dh, dh).noalias() = p.transpose() * doh;
    ColVec<T> rowdot = (dp.array() * p.array()).rowwise().sum();
    Mat<T> ds = (p.array() * (dp.array().colwise() - rowdot.array())) * scale;
    dq.middleCols(h * dh, dh).noalias() = ds * c.k.middleCols(h * dh, dh);
    dk.middleCols(h * dh, dh).noalias() = ds.transpose() * c.q.middleCols(h * dh, dh);
  }
  AttnGrads<T> out;
  out.dxq = linear_bwd(a.q, grad.q, c.xq, dq);
  out.dxkv = linear_bwd(a.k, grad.k, c.xkv, dk);
  out.dxkv += linear_bwd(a.v, grad.v, c.xkv, dv);
  return out;
}

// Single-query attention against cached keys/values (incremental decoding).
template <typename T>
Mat<T> attend_cached(const Mat<T>& q, const Mat<T>& k, const Mat<T>& v, int heads) {
  const auto d = q.cols();
  const auto dh = d / heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  Mat<T> o(q.rows(), d);
  for (int h = 0; h < heads; ++h) {
    Mat<T> s = (q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose()) * scale;
    softmax_rows(s);
    o.middleCols(h * dh, dh).noalias() = s * v.middleCols(h * dh, dh);
  }
  return o;
}

template <typename T>
Mat<T> positional_table(Eigen::Index n, Eigen::Index d) {
  Mat<T> pe(n, d);
  for (Eigen::Index pos = 0; pos < n; ++pos)
    for (Eigen::Index i = 0; i < d; i += 2) {
      double angle = static_cast<double>(pos) / std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d));
      pe(pos, i) = static_cast<T>(std::sin(angle));
      if (i + 1 < d) pe(pos, i + 1) = static_cast<T>(std::cos(angle));
    }
  return pe;
}

}  // namespace legalie::genix

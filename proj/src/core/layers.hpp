#pragma once

#include <cmath>

#include "conv.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace hdh {

template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

enum class Mode { Train, Eval };

// ---------------------------------------------------------------------------
// Convolution / transposed convolution parameter blocks

template <typename S>
struct ConvLayer {
  int cin = 0, cout = 0, k = 4, stride = 2, pad = 1;
  MatRM<S> w;   // (k*k*cin) x cout
  VecX<S> b;    // cout

  void init(int cin_, int cout_, int k_, int stride_, int pad_, Rng& rng, double stddev) {
    cin = cin_;
    cout = cout_;
    k = k_;
    stride = stride_;
    pad = pad_;
    w.resize(k * k * cin, cout);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = S(rng.gaussian() * stddev);
    b = VecX<S>::Zero(cout);
  }
};

// Transposed convolution with output size exactly 2H x 2W for k=4, s=2, p=1.
// Stored as the weight of the reverse-direction convolution (cout -> cin),
// so forward here is that convolution's data-gradient.
template <typename S>
struct ConvTLayer {
  int cin = 0, cout = 0, k = 4, stride = 2, pad = 1;
  MatRM<S> w;   // (k*k*cout) x cin
  VecX<S> b;    // cout

  void init(int cin_, int cout_, int k_, int stride_, int pad_, Rng& rng, double stddev) {
    cin = cin_;
    cout = cout_;
    k = k_;
    stride = stride_;
    pad = pad_;
    w.resize(k * k * cout, cin);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = S(rng.gaussian() * stddev);
    b = VecX<S>::Zero(cout);
  }

  Tensor3<S> forward(const Tensor3<S>& x) const {
    Tensor3<S> y = conv_backward_data(x, w, x.h * stride, x.w * stride, cout, k, stride, pad);
    for (int yy = 0; yy < y.h; ++yy)
      for (int xx = 0; xx < y.w; ++xx)
        for (int ch = 0; ch < y.c; ++ch) y.at(yy, xx, ch) += b[ch];
    return y;
  }

  Tensor3<S> backward_data(const Tensor3<S>& gy) const {
    return conv_forward<S>(gy, w, nullptr, k, stride, pad);
  }

  void backward_weight(const Tensor3<S>& x, const Tensor3<S>& gy, MatRM<S>& gw,
                       VecX<S>& gb) const {
    MatRM<S> col;
    im2col(gy, k, stride, pad, col);
    Eigen::Map<const MatRM<S>> xm(x.v.data(), x.h * x.w, x.c);
    gw.noalias() = col.transpose() * xm;
    Eigen::Map<const MatRM<S>> gym(gy.v.data(), gy.h * gy.w, gy.c);
    gb = gym.colwise().sum().transpose();
  }
};

// ---------------------------------------------------------------------------
// Batch normalization (per channel over the spatial extent; batch size 1
// makes the train-time statistics instance statistics)

template <typename S>
struct BatchNorm {
  VecX<S> gamma, beta, run_mean, run_var;
  double eps = 1e-5;
  double momentum = 0.1;  // running = (1-m)*running + m*batch

  void init(int channels) {
    gamma = VecX<S>::Ones(channels);
    beta = VecX<S>::Zero(channels);
    run_mean = VecX<S>::Zero(channels);
    run_var = VecX<S>::Ones(channels);
  }
};

template <typename S>
struct BNCache {
  Tensor3<S> xhat;
  VecX<S> inv_std;
};

// With batches of one image the statistics are per-image spatial moments.
// Inference uses the same per-image statistics rather than running averages
// (running stats from single-image batches generalize poorly, and this
// architecture family normalizes test batches with their own moments). The
// running stats are still tracked and serialized for diagnostics.
template <typename S>
Tensor3<S> batchnorm_forward(BatchNorm<S>& bn, const Tensor3<S>& x, Mode mode,
                             BNCache<S>* cache, bool update_running = true) {
  const int n = x.h * x.w;
  const int c = x.c;
  Tensor3<S> y(x.h, x.w, c);
  Eigen::Map<const MatRM<S>> xm(x.v.data(), n, c);
  Eigen::Map<MatRM<S>> ym(y.v.data(), n, c);
  VecX<S> mu = xm.colwise().mean().transpose();
  VecX<S> var(c), inv_std(c);
  for (int ch = 0; ch < c; ++ch) {
    var[ch] = (xm.col(ch).array() - mu[ch]).square().mean();
    inv_std[ch] = S(1) / std::sqrt(var[ch] + S(bn.eps));
  }
  Tensor3<S> xhat(x.h, x.w, c);
  Eigen::Map<MatRM<S>> xhm(xhat.v.data(), n, c);
  for (int ch = 0; ch < c; ++ch) {
    xhm.col(ch) = (xm.col(ch).array() - mu[ch]) * inv_std[ch];
    ym.col(ch) = xhm.col(ch).array() * bn.gamma[ch] + bn.beta[ch];
  }
  if (mode == Mode::Train && update_running) {
    bn.run_mean = (S(1) - S(bn.momentum)) * bn.run_mean + S(bn.momentum) * mu;
    bn.run_var = (S(1) - S(bn.momentum)) * bn.run_var + S(bn.momentum) * var;
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

template <typename S>
Tensor3<S> batchnorm_backward(const BatchNorm<S>& bn, const BNCache<S>& cache,
                              const Tensor3<S>& gy, VecX<S>& ggamma, VecX<S>& gbeta) {
  const int n = gy.h * gy.w;
  const int c = gy.c;
  Tensor3<S> gx(gy.h, gy.w, c);
  Eigen::Map<const MatRM<S>> gym(gy.v.data(), n, c);
  Eigen::Map<const MatRM<S>> xhm(cache.xhat.v.data(), n, c);
  Eigen::Map<MatRM<S>> gxm(gx.v.data(), n, c);
  ggamma.resize(c);
  gbeta.resize(c);
  for (int ch = 0; ch < c; ++ch) {
    S sum_gy = gym.col(ch).sum();
    S sum_gy_xhat = (gym.col(ch).array() * xhm.col(ch).array()).sum();
    ggamma[ch] = sum_gy_xhat;
    gbeta[ch] = sum_gy;
    // gx = gamma*inv_std/n * (n*gy - sum(gy) - xhat*sum(gy*xhat))
    gxm.col(ch) = (bn.gamma[ch] * cache.inv_std[ch] / S(n)) *
                  (S(n) * gym.col(ch).array() - sum_gy - xhm.col(ch).array() * sum_gy_xhat);
  }
  return gx;
}

// ---------------------------------------------------------------------------
// Activations

template <typename S>
Tensor3<S> leaky_relu_forward(const Tensor3<S>& x, double slope) {
  Tensor3<S> y = x;
  for (auto& v : y.v) v = v > S(0) ? v : S(slope) * v;
  return y;
}

template <typename S>
Tensor3<S> leaky_relu_backward(const Tensor3<S>& x, const Tensor3<S>& gy, double slope) {
  Tensor3<S> gx = gy;
  for (size_t i = 0; i < gx.v.size(); ++i)
    if (x.v[i] <= S(0)) gx.v[i] *= S(slope);
  return gx;
}

template <typename S>
Tensor3<S> tanh_forward(const Tensor3<S>& x) {
  Tensor3<S> y = x;
  for (auto& v : y.v) v = std::tanh(v);
  return y;
}

template <typename S>
Tensor3<S> tanh_backward(const Tensor3<S>& y, const Tensor3<S>& gy) {
  Tensor3<S> gx = gy;
  for (size_t i = 0; i < gx.v.size(); ++i) gx.v[i] *= (S(1) - y.v[i] * y.v[i]);
  return gx;
}

// Inverted dropout; mask entries are 0 or 1/keep.
template <typename S>
Tensor3<S> dropout_mask(int h, int w, int c, double rate, Rng& rng) {
  Tensor3<S> mask(h, w, c);
  const S scale = S(1.0 / (1.0 - rate));
  for (auto& v : mask.v) v = (rng.uniform() < rate) ? S(0) : scale;
  return mask;
}

template <typename S>
Tensor3<S> apply_mask(const Tensor3<S>& x, const Tensor3<S>& mask) {
  Tensor3<S> y = x;
  for (size_t i = 0; i < y.v.size(); ++i) y.v[i] *= mask.v[i];
  return y;
}

}  // namespace hdh

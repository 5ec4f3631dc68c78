#pragma once

#include <Eigen/Dense>

#include "tensor.hpp"

namespace hdh {

// 2-D convolution via im2col + GEMM.
//
// Kernel weights are stored flat as a (k*k*cin) x cout row-major matrix;
// the patch column index is (ky*k + kx)*cin + ci, matching the HWC tensor
// layout. Transposed convolution reuses the same three routines with the
// data/gradient roles swapped.

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

template <typename S>
void im2col(const Tensor3<S>& x, int k, int stride, int pad, MatRM<S>& col) {
  const int oh = conv_out_dim(x.h, k, stride, pad);
  const int ow = conv_out_dim(x.w, k, stride, pad);
  col.setZero(oh * ow, k * k * x.c);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int row = oy * ow + ox;
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy * stride + ky - pad;
        if (iy < 0 || iy >= x.h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox * stride + kx - pad;
          if (ix < 0 || ix >= x.w) continue;
          const S* src = &x.v[(size_t(iy) * x.w + ix) * x.c];
          S* dst = col.data() + size_t(row) * col.cols() + (ky * k + kx) * x.c;
          for (int ci = 0; ci < x.c; ++ci) dst[ci] = src[ci];
        }
      }
    }
  }
}

// Scatter-add of an im2col matrix back into image space.
template <typename S>
void col2im(const MatRM<S>& col, int h, int w, int c, int k, int stride, int pad,
            Tensor3<S>& x) {
  const int oh = conv_out_dim(h, k, stride, pad);
  const int ow = conv_out_dim(w, k, stride, pad);
  x = Tensor3<S>(h, w, c);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int row = oy * ow + ox;
      for (int ky = 0; ky < k; ++ky) {
        const int iy = oy * stride + ky - pad;
        if (iy < 0 || iy >= h) continue;
        for (int kx = 0; kx < k; ++kx) {
          const int ix = ox * stride + kx - pad;
          if (ix < 0 || ix >= w) continue;
          S* dst = &x.v[(size_t(iy) * w + ix) * c];
          const S* src = col.data() + size_t(row) * col.cols() + (ky * k + kx) * c;
          for (int ci = 0; ci < c; ++ci) dst[ci] += src[ci];
        }
      }
    }
  }
}

template <typename S>
Tensor3<S> conv_forward(const Tensor3<S>& x, const MatRM<S>& weight,
                        const Eigen::Matrix<S, Eigen::Dynamic, 1>* bias, int k, int stride,
                        int pad) {
  const int oh = conv_out_dim(x.h, k, stride, pad);
  const int ow = conv_out_dim(x.w, k, stride, pad);
  const int cout = int(weight.cols());
  MatRM<S> col;
  im2col(x, k, stride, pad, col);
  Tensor3<S> y(oh, ow, cout);
  Eigen::Map<MatRM<S>> ym(y.v.data(), oh * ow, cout);
  ym.noalias() = col * weight;
  if (bias) ym.rowwise() += bias->transpose();
  return y;
}

// Gradient w.r.t. the convolution input.
template <typename S>
Tensor3<S> conv_backward_data(const Tensor3<S>& gy, const MatRM<S>& weight, int in_h, int in_w,
                              int in_c, int k, int stride, int pad) {
  Eigen::Map<const MatRM<S>> gym(gy.v.data(), gy.h * gy.w, gy.c);
  MatRM<S> gcol = gym * weight.transpose();
  Tensor3<S> gx;
  col2im(gcol, in_h, in_w, in_c, k, stride, pad, gx);
  return gx;
}

// Gradients w.r.t. weight and bias.
template <typename S>
void conv_backward_weight(const Tensor3<S>& x, const Tensor3<S>& gy, int k, int stride, int pad,
                          MatRM<S>& gweight, Eigen::Matrix<S, Eigen::Dynamic, 1>& gbias) {
  MatRM<S> col;
  im2col(x, k, stride, pad, col);
  Eigen::Map<const MatRM<S>> gym(gy.v.data(), gy.h * gy.w, gy.c);
  gweight.noalias() = col.transpose() * gym;
  gbias = gym.colwise().sum().transpose();
}

}  // namespace hdh

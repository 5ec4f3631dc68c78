#pragma once

#include "errors.hpp"
#include "tensor.hpp"

namespace hdh {

enum class NormKind { L1, L2 };

struct LossConfig {
  double alpha1 = 1.0;  // weight on the extraction term
  double alpha2 = 1.0;  // weight on the hiding loss in the joint loss
  NormKind norm = NormKind::L1;

  void validate() const {
    if (alpha1 <= 0.0 || alpha2 <= 0.0) fail(ErrorCode::Config, "alpha1/alpha2 must be > 0");
  }
};

// Mean elementwise distance: sum(|d|)/M for L1, sum(d^2)/M for L2, where M
// is the element count of the target.
template <typename S>
double norm_distance(const Tensor3<S>& pred, const Tensor3<S>& target, NormKind kind) {
  if (!pred.same_shape(target)) fail(ErrorCode::Shape, "loss inputs have mismatched shapes");
  double acc = 0.0;
  if (kind == NormKind::L1) {
    for (size_t i = 0; i < pred.v.size(); ++i) acc += std::abs(double(pred.v[i]) - target.v[i]);
  } else {
    for (size_t i = 0; i < pred.v.size(); ++i) {
      double d = double(pred.v[i]) - target.v[i];
      acc += d * d;
    }
  }
  return acc / double(target.size());
}

// d/d(pred) of scale * norm_distance(pred, target).
template <typename S>
Tensor3<S> norm_distance_grad(const Tensor3<S>& pred, const Tensor3<S>& target, NormKind kind,
                              double scale) {
  if (!pred.same_shape(target)) fail(ErrorCode::Shape, "loss inputs have mismatched shapes");
  Tensor3<S> g(pred.h, pred.w, pred.c);
  const double inv_m = scale / double(target.size());
  if (kind == NormKind::L1) {
    for (size_t i = 0; i < pred.v.size(); ++i) {
      double d = double(pred.v[i]) - target.v[i];
      g.v[i] = S(d > 0 ? inv_m : (d < 0 ? -inv_m : 0.0));
    }
  } else {
    for (size_t i = 0; i < pred.v.size(); ++i)
      g.v[i] = S(2.0 * (double(pred.v[i]) - target.v[i]) * inv_m);
  }
  return g;
}

template <typename S>
double style_loss(const Tensor3<S>& z_pred, const Tensor3<S>& z_g, NormKind kind) {
  return norm_distance(z_pred, z_g, kind);
}

template <typename S>
double hiding_loss(const Tensor3<S>& s, const Tensor3<S>& c, const Tensor3<S>& m_hat,
                   const Tensor3<S>& m, const LossConfig& cfg) {
  return norm_distance(s, c, cfg.norm) + cfg.alpha1 * norm_distance(m_hat, m, cfg.norm);
}

inline double joint_loss(double l_style, double l_hide, const LossConfig& cfg) {
  return l_style + cfg.alpha2 * l_hide;
}

}  // namespace hdh

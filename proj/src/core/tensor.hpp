#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace hdh {

// H x W x C tensor, row-major HWC layout. Scalar is float in production
// code and double in the gradient-check tests.
template <typename S>
struct Tensor3 {
  int h = 0, w = 0, c = 0;
  std::vector<S> v;

  Tensor3() = default;
  Tensor3(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(size_t(h_) * w_ * c_, S(0)) {}

  size_t size() const { return v.size(); }

  S& at(int y, int x, int ch) { return v[(size_t(y) * w + x) * c + ch]; }
  S at(int y, int x, int ch) const { return v[(size_t(y) * w + x) * c + ch]; }

  bool same_shape(const Tensor3& o) const { return h == o.h && w == o.w && c == o.c; }

  void fill(S val) { std::fill(v.begin(), v.end(), val); }

  template <typename T>
  Tensor3<T> cast() const {
    Tensor3<T> out(h, w, c);
    for (size_t i = 0; i < v.size(); ++i) out.v[i] = T(v[i]);
    return out;
  }
};

using TensorF = Tensor3<float>;
using TensorD = Tensor3<double>;

// Channel-wise concatenation of two same-sized tensors.
template <typename S>
Tensor3<S> concat_channels(const Tensor3<S>& a, const Tensor3<S>& b) {
  assert(a.h == b.h && a.w == b.w);
  Tensor3<S> out(a.h, a.w, a.c + b.c);
  for (int y = 0; y < a.h; ++y)
    for (int x = 0; x < a.w; ++x) {
      for (int ch = 0; ch < a.c; ++ch) out.at(y, x, ch) = a.at(y, x, ch);
      for (int ch = 0; ch < b.c; ++ch) out.at(y, x, a.c + ch) = b.at(y, x, ch);
    }
  return out;
}

template <typename S>
void split_channels(const Tensor3<S>& joined, int c_first, Tensor3<S>& a, Tensor3<S>& b) {
  a = Tensor3<S>(joined.h, joined.w, c_first);
  b = Tensor3<S>(joined.h, joined.w, joined.c - c_first);
  for (int y = 0; y < joined.h; ++y)
    for (int x = 0; x < joined.w; ++x) {
      for (int ch = 0; ch < c_first; ++ch) a.at(y, x, ch) = joined.at(y, x, ch);
      for (int ch = c_first; ch < joined.c; ++ch) b.at(y, x, ch - c_first) = joined.at(y, x, ch);
    }
  return;
}

}  // namespace hdh

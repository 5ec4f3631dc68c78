#pragma once

#include <cmath>
#include <vector>

#include "unet.hpp"

namespace hdh {

template <typename S>
class Adam {
 public:
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void init(const std::vector<ParamSpan<S>>& spans) {
    m_.clear();
    v_.clear();
    for (const auto& s : spans) {
      m_.emplace_back(s.n, S(0));
      v_.emplace_back(s.n, S(0));
    }
    t_ = 0;
  }

  void step(const std::vector<ParamSpan<S>>& spans) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, double(t_));
    const double bc2 = 1.0 - std::pow(beta2, double(t_));
    for (size_t k = 0; k < spans.size(); ++k) {
      const auto& s = spans[k];
      S* m = m_[k].data();
      S* v = v_[k].data();
      for (size_t i = 0; i < s.n; ++i) {
        double g = double(s.g[i]);
        m[i] = S(beta1 * m[i] + (1.0 - beta1) * g);
        v[i] = S(beta2 * v[i] + (1.0 - beta2) * g * g);
        double mhat = double(m[i]) / bc1;
        double vhat = double(v[i]) / bc2;
        s.p[i] = S(double(s.p[i]) - lr * mhat / (std::sqrt(vhat) + eps));
      }
    }
  }

  uint64_t step_count() const { return t_; }
  void set_step_count(uint64_t t) { t_ = t; }
  std::vector<std::vector<S>>& moment1() { return m_; }
  std::vector<std::vector<S>>& moment2() { return v_; }

 private:
  std::vector<std::vector<S>> m_, v_;
  uint64_t t_ = 0;
};

}  // namespace hdh

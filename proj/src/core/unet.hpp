#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "errors.hpp"
#include "layers.hpp"

namespace hdh {

// Architecture description of the two-input encoder-decoder F_w: log2(S)
// stride-2 downsampling stages to a 1x1 bottleneck, the same number of
// transposed-convolution upsampling stages with skip concatenations, tanh
// output. Kernel 4, stride 2 on every stage.
struct NetworkSpec {
  int image_size = 128;
  std::vector<int> down_channels = {64, 128, 256, 512, 512, 512, 512};
  std::vector<int> up_channels;  // empty -> mirror of down_channels
  int kernel = 4;
  int stride = 2;
  std::vector<int> dropout_stages = {0, 1};
  double dropout_rate = 0.5;
  double leaky_slope = 0.2;
  double init_stddev = 0.02;

  int stages() const {
    int s = image_size, n = 0;
    while (s > 1) {
      s /= 2;
      ++n;
    }
    return n;
  }

  std::vector<int> resolved_up_channels() const {
    if (!up_channels.empty()) return up_channels;
    const int d = int(down_channels.size());
    std::vector<int> uc(d - 1);
    for (int j = 0; j < d - 1; ++j) uc[j] = down_channels[d - 2 - j];
    return uc;
  }

  void validate() const {
    if (image_size < 4 || (image_size & (image_size - 1)) != 0)
      fail(ErrorCode::Config, "image_size must be a power of two >= 4, got " +
                                  std::to_string(image_size));
    if (int(down_channels.size()) != stages())
      fail(ErrorCode::Config,
           "down_channels must have log2(image_size) = " + std::to_string(stages()) +
               " entries, got " + std::to_string(down_channels.size()));
    for (int c : down_channels)
      if (c <= 0) fail(ErrorCode::Config, "down_channels entries must be positive");
    if (!up_channels.empty() && int(up_channels.size()) != stages() - 1)
      fail(ErrorCode::Config, "up_channels must have log2(image_size)-1 entries");
    for (int c : resolved_up_channels())
      if (c <= 0) fail(ErrorCode::Config, "up_channels entries must be positive");
    if (kernel != 4 || stride != 2)
      fail(ErrorCode::Config, "kernel must be 4 and stride must be 2");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
      fail(ErrorCode::Config, "dropout_rate must be in [0, 1)");
    for (int s : dropout_stages)
      if (s < 0 || s >= stages() - 1)
        fail(ErrorCode::Config, "dropout_stages must index non-final up stages");
  }

  std::string canonical() const {
    std::string s = "S=" + std::to_string(image_size) + ";k=" + std::to_string(kernel) +
                    ";s=" + std::to_string(stride) + ";down=";
    for (int c : down_channels) s += std::to_string(c) + ",";
    s += ";up=";
    for (int c : resolved_up_channels()) s += std::to_string(c) + ",";
    s += ";drop=";
    for (int d : dropout_stages) s += std::to_string(d) + ",";
    char buf[96];
    std::snprintf(buf, sizeof(buf), ";rate=%.6f;slope=%.6f", dropout_rate, leaky_slope);
    s += buf;
    return s;
  }

  std::string fingerprint() const {
    std::string c = canonical();
    uint64_t h = fnv1a(c.data(), c.size());
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

template <typename S>
struct UNetTape {
  struct Down {
    Tensor3<S> x;        // stage input (stage 0: the 6-channel concat)
    Tensor3<S> conv_out;
    BNCache<S> bn;
    Tensor3<S> act_in;   // pre-LeakyReLU
    Tensor3<S> act_out;
  };
  struct Up {
    Tensor3<S> x;         // stage input (with skip concat)
    Tensor3<S> convt_out;
    BNCache<S> bn;
    Tensor3<S> mask;      // dropout mask, empty if unused
    Tensor3<S> act_in;    // pre-ReLU
    Tensor3<S> act_out;
  };
  std::vector<Down> down;
  std::vector<Up> up;
  Tensor3<S> out;
  Mode mode = Mode::Eval;
};

template <typename S>
struct UNetGrads {
  std::vector<MatRM<S>> down_w, up_w;
  std::vector<VecX<S>> down_b, up_b;
  std::vector<VecX<S>> down_gamma, down_beta, up_gamma, up_beta;

  void zero() {
    for (auto& m : down_w) m.setZero();
    for (auto& m : up_w) m.setZero();
    for (auto& v : down_b) v.setZero();
    for (auto& v : up_b) v.setZero();
    for (auto& v : down_gamma) v.setZero();
    for (auto& v : down_beta) v.setZero();
    for (auto& v : up_gamma) v.setZero();
    for (auto& v : up_beta) v.setZero();
  }
};

// A contiguous view over one trainable parameter array and its gradient.
template <typename S>
struct ParamSpan {
  S* p;
  S* g;
  size_t n;
};

template <typename S>
class UNet {
 public:
  NetworkSpec spec;
  std::vector<ConvLayer<S>> down;
  std::vector<BatchNorm<S>> down_bn;  // [0] unused (no norm on first stage)
  std::vector<ConvTLayer<S>> up;
  std::vector<BatchNorm<S>> up_bn;    // no norm on the final stage

  static UNet build(const NetworkSpec& spec, uint64_t seed) {
    spec.validate();
    UNet net;
    net.spec = spec;
    Rng rng(hash_combine(seed, 0x756e6574ULL));
    const int d = spec.stages();
    const auto& dc = spec.down_channels;
    const auto uc = spec.resolved_up_channels();
    net.down.resize(d);
    net.down_bn.resize(d);
    net.up.resize(d);
    net.up_bn.resize(d - 1);
    for (int i = 0; i < d; ++i) {
      int cin = (i == 0) ? 6 : dc[i - 1];
      net.down[i].init(cin, dc[i], spec.kernel, spec.stride, 1, rng, spec.init_stddev);
      if (i > 0) net.down_bn[i].init(dc[i]);
    }
    for (int j = 0; j < d; ++j) {
      int cin = (j == 0) ? dc[d - 1] : ((j < d - 1) ? uc[j - 1] : uc[d - 2]) + dc[d - 1 - j];
      int cout = (j < d - 1) ? uc[j] : 3;
      net.up[j].init(cin, cout, spec.kernel, spec.stride, 1, rng, spec.init_stddev);
      if (j < d - 1) net.up_bn[j].init(cout);
    }
    return net;
  }

  bool stage_has_dropout(int j) const {
    for (int s : spec.dropout_stages)
      if (s == j) return true;
    return false;
  }

  Tensor3<S> forward(const Tensor3<S>& a, const Tensor3<S>& b, Mode mode,
                     uint64_t dropout_seed, UNetTape<S>* tape,
                     bool update_running = true) {
    if (a.h != spec.image_size || a.w != spec.image_size || a.c != 3 || !a.same_shape(b))
      fail(ErrorCode::Shape, "forward expects two " + std::to_string(spec.image_size) + "x" +
                                 std::to_string(spec.image_size) + "x3 inputs");
    const int d = spec.stages();
    UNetTape<S> local;
    UNetTape<S>& t = tape ? *tape : local;
    t.mode = mode;
    t.down.assign(d, {});
    t.up.assign(d, {});

    Tensor3<S> cur = concat_channels(a, b);
    for (int i = 0; i < d; ++i) {
      auto& dc = t.down[i];
      dc.x = std::move(cur);
      dc.conv_out = conv_forward(dc.x, down[i].w, &down[i].b, down[i].k, down[i].stride,
                                 down[i].pad);
      dc.act_in = (i > 0)
                      ? batchnorm_forward(down_bn[i], dc.conv_out, mode,
                                          mode == Mode::Train ? &dc.bn : nullptr,
                                          mode == Mode::Train && update_running)
                      : dc.conv_out;
      dc.act_out = leaky_relu_forward(dc.act_in, spec.leaky_slope);
      cur = dc.act_out;
    }

    for (int j = 0; j < d; ++j) {
      auto& uc = t.up[j];
      uc.x = (j == 0) ? t.down[d - 1].act_out
                      : concat_channels(cur, t.down[d - 1 - j].act_out);
      uc.convt_out = up[j].forward(uc.x);
      if (j < d - 1) {
        Tensor3<S> normed = batchnorm_forward(up_bn[j], uc.convt_out, mode,
                                              mode == Mode::Train ? &uc.bn : nullptr,
                                              mode == Mode::Train && update_running);
        if (mode == Mode::Train && stage_has_dropout(j) && spec.dropout_rate > 0.0) {
          Rng mrng(hash_combine(dropout_seed, 0xd09u + j));
          uc.mask = dropout_mask<S>(normed.h, normed.w, normed.c, spec.dropout_rate, mrng);
          uc.act_in = apply_mask(normed, uc.mask);
        } else {
          uc.act_in = std::move(normed);
        }
        uc.act_out = leaky_relu_forward(uc.act_in, 0.0);  // plain ReLU
        cur = uc.act_out;
      } else {
        t.out = tanh_forward(uc.convt_out);
      }
    }
    return t.out;
  }

  // Accumulates parameter gradients into `grads`; returns gradients w.r.t.
  // the two input images through `ga`/`gb` when non-null. The tape must come
  // from a Train-mode forward.
  void backward(const UNetTape<S>& t, const Tensor3<S>& gout, UNetGrads<S>& grads,
                Tensor3<S>* ga, Tensor3<S>* gb) const {
    const int d = spec.stages();
    // Gradient flowing into each down stage's act_out (from skips and path).
    std::vector<Tensor3<S>> gskip(d);

    Tensor3<S> gcur;  // gradient w.r.t. current up act_out
    for (int j = d - 1; j >= 0; --j) {
      const auto& uc = t.up[j];
      Tensor3<S> g_convt;
      if (j < d - 1) {
        Tensor3<S> g_act_in = leaky_relu_backward(uc.act_in, gcur, 0.0);
        Tensor3<S> g_normed =
            (uc.mask.size() > 0) ? apply_mask(g_act_in, uc.mask) : std::move(g_act_in);
        VecX<S> ggamma, gbeta;
        g_convt = batchnorm_backward(up_bn[j], uc.bn, g_normed, ggamma, gbeta);
        grads.up_gamma[j] += ggamma;
        grads.up_beta[j] += gbeta;
      } else {
        g_convt = tanh_backward(t.out, gout);
      }
      MatRM<S> gw;
      VecX<S> gbias;
      up[j].backward_weight(uc.x, g_convt, gw, gbias);
      grads.up_w[j] += gw;
      grads.up_b[j] += gbias;
      Tensor3<S> gx = up[j].backward_data(g_convt);
      if (j == 0) {
        gskip[d - 1] = add_into(std::move(gskip[d - 1]), gx);
      } else {
        Tensor3<S> gprev, gsk;
        split_channels(gx, gx.c - t.down[d - 1 - j].act_out.c, gprev, gsk);
        gskip[d - 1 - j] = add_into(std::move(gskip[d - 1 - j]), gsk);
        gcur = std::move(gprev);
      }
    }

    Tensor3<S> gdown;  // gradient w.r.t. down stage output
    for (int i = d - 1; i >= 0; --i) {
      const auto& dc = t.down[i];
      Tensor3<S> g_out = std::move(gskip[i]);
      if (i < d - 1) g_out = add_into(std::move(g_out), gdown);
      Tensor3<S> g_act_in = leaky_relu_backward(dc.act_in, g_out, spec.leaky_slope);
      Tensor3<S> g_conv;
      if (i > 0) {
        VecX<S> ggamma, gbeta;
        g_conv = batchnorm_backward(down_bn[i], dc.bn, g_act_in, ggamma, gbeta);
        grads.down_gamma[i] += ggamma;
        grads.down_beta[i] += gbeta;
      } else {
        g_conv = std::move(g_act_in);
      }
      MatRM<S> gw;
      VecX<S> gbias;
      conv_backward_weight(dc.x, g_conv, down[i].k, down[i].stride, down[i].pad, gw, gbias);
      grads.down_w[i] += gw;
      grads.down_b[i] += gbias;
      gdown = conv_backward_data(g_conv, down[i].w, dc.x.h, dc.x.w, dc.x.c, down[i].k,
                                 down[i].stride, down[i].pad);
    }

    if (ga || gb) {
      Tensor3<S> a_grad, b_grad;
      split_channels(gdown, 3, a_grad, b_grad);
      if (ga) *ga = std::move(a_grad);
      if (gb) *gb = std::move(b_grad);
    }
  }

  UNetGrads<S> make_grads() const {
    UNetGrads<S> g;
    const int d = spec.stages();
    g.down_w.resize(d);
    g.down_b.resize(d);
    g.down_gamma.resize(d);
    g.down_beta.resize(d);
    g.up_w.resize(d);
    g.up_b.resize(d);
    g.up_gamma.resize(d - 1);
    g.up_beta.resize(d - 1);
    for (int i = 0; i < d; ++i) {
      g.down_w[i] = MatRM<S>::Zero(down[i].w.rows(), down[i].w.cols());
      g.down_b[i] = VecX<S>::Zero(down[i].b.size());
      if (i > 0) {
        g.down_gamma[i] = VecX<S>::Zero(down_bn[i].gamma.size());
        g.down_beta[i] = VecX<S>::Zero(down_bn[i].beta.size());
      }
      g.up_w[i] = MatRM<S>::Zero(up[i].w.rows(), up[i].w.cols());
      g.up_b[i] = VecX<S>::Zero(up[i].b.size());
      if (i < d - 1) {
        g.up_gamma[i] = VecX<S>::Zero(up_bn[i].gamma.size());
        g.up_beta[i] = VecX<S>::Zero(up_bn[i].beta.size());
      }
    }
    return g;
  }

  // Trainable parameters and matching gradients, in a fixed order.
  std::vector<ParamSpan<S>> param_spans(UNetGrads<S>& g) {
    std::vector<ParamSpan<S>> spans;
    const int d = spec.stages();
    for (int i = 0; i < d; ++i) {
      spans.push_back({down[i].w.data(), g.down_w[i].data(), size_t(down[i].w.size())});
      spans.push_back({down[i].b.data(), g.down_b[i].data(), size_t(down[i].b.size())});
      if (i > 0) {
        spans.push_back({down_bn[i].gamma.data(), g.down_gamma[i].data(),
                         size_t(down_bn[i].gamma.size())});
        spans.push_back(
            {down_bn[i].beta.data(), g.down_beta[i].data(), size_t(down_bn[i].beta.size())});
      }
    }
    for (int j = 0; j < d; ++j) {
      spans.push_back({up[j].w.data(), g.up_w[j].data(), size_t(up[j].w.size())});
      spans.push_back({up[j].b.data(), g.up_b[j].data(), size_t(up[j].b.size())});
      if (j < d - 1) {
        spans.push_back(
            {up_bn[j].gamma.data(), g.up_gamma[j].data(), size_t(up_bn[j].gamma.size())});
        spans.push_back(
            {up_bn[j].beta.data(), g.up_beta[j].data(), size_t(up_bn[j].beta.size())});
      }
    }
    return spans;
  }

  size_t param_count() const {
    size_t n = 0;
    const int d = spec.stages();
    for (int i = 0; i < d; ++i) {
      n += size_t(down[i].w.size()) + down[i].b.size();
      if (i > 0) n += size_t(down_bn[i].gamma.size()) * 2;
    }
    for (int j = 0; j < d; ++j) {
      n += size_t(up[j].w.size()) + up[j].b.size();
      if (j < d - 1) n += size_t(up_bn[j].gamma.size()) * 2;
    }
    return n;
  }

  template <typename T>
  UNet<T> cast() const {
    UNet<T> o;
    o.spec = spec;
    const int d = spec.stages();
    o.down.resize(d);
    o.down_bn.resize(d);
    o.up.resize(d);
    o.up_bn.resize(d - 1);
    for (int i = 0; i < d; ++i) {
      o.down[i].cin = down[i].cin;
      o.down[i].cout = down[i].cout;
      o.down[i].k = down[i].k;
      o.down[i].stride = down[i].stride;
      o.down[i].pad = down[i].pad;
      o.down[i].w = down[i].w.template cast<T>();
      o.down[i].b = down[i].b.template cast<T>();
      if (i > 0) {
        o.down_bn[i].gamma = down_bn[i].gamma.template cast<T>();
        o.down_bn[i].beta = down_bn[i].beta.template cast<T>();
        o.down_bn[i].run_mean = down_bn[i].run_mean.template cast<T>();
        o.down_bn[i].run_var = down_bn[i].run_var.template cast<T>();
      }
    }
    for (int j = 0; j < d; ++j) {
      o.up[j].cin = up[j].cin;
      o.up[j].cout = up[j].cout;
      o.up[j].k = up[j].k;
      o.up[j].stride = up[j].stride;
      o.up[j].pad = up[j].pad;
      o.up[j].w = up[j].w.template cast<T>();
      o.up[j].b = up[j].b.template cast<T>();
      if (j < d - 1) {
        o.up_bn[j].gamma = up_bn[j].gamma.template cast<T>();
        o.up_bn[j].beta = up_bn[j].beta.template cast<T>();
        o.up_bn[j].run_mean = up_bn[j].run_mean.template cast<T>();
        o.up_bn[j].run_var = up_bn[j].run_var.template cast<T>();
      }
    }
    return o;
  }

 private:
  static Tensor3<S> add_into(Tensor3<S>&& acc, const Tensor3<S>& g) {
    if (acc.size() == 0) return g;
    for (size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += g.v[i];
    return std::move(acc);
  }
};

}  // namespace hdh

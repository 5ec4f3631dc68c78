#include "detector.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "rng.hpp"

namespace hdh {
namespace {

// XuNet-style KV kernel, scaled by 1/12.
constexpr double kKv[5][5] = {{-1, 2, -2, 2, -1},
                              {2, -6, 8, -6, 2},
                              {-2, 8, -12, 8, -2},
                              {2, -6, 8, -6, 2},
                              {-1, 2, -2, 2, -1}};

struct StageCache {
  TensorF x, act_in;
};

struct ForwardCache {
  std::vector<StageCache> stages;
  std::vector<float> pooled;
  float logit = 0;
};

float forward_pass(const Detector& det, const TensorF& residual, ForwardCache* cache) {
  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  fc.stages.resize(det.stages.size());
  TensorF cur = residual;
  for (size_t i = 0; i < det.stages.size(); ++i) {
    auto& sc = fc.stages[i];
    sc.x = std::move(cur);
    const auto& layer = det.stages[i];
    sc.act_in = conv_forward(sc.x, layer.w, &layer.b, layer.k, layer.stride, layer.pad);
    cur = leaky_relu_forward(sc.act_in, 0.2);
  }
  // Per-channel mean and mean square; the second moment carries the
  // residual-energy signal.
  const int n = cur.h * cur.w;
  fc.pooled.assign(2 * cur.c, 0.0f);
  for (int y = 0; y < cur.h; ++y)
    for (int x = 0; x < cur.w; ++x)
      for (int c = 0; c < cur.c; ++c) {
        float v = cur.at(y, x, c);
        fc.pooled[c] += v;
        fc.pooled[cur.c + c] += v * v;
      }
  for (auto& v : fc.pooled) v /= float(n);
  float logit = det.head_b;
  for (size_t c = 0; c < fc.pooled.size(); ++c) logit += det.head_w[c] * fc.pooled[c];
  fc.logit = logit;
  return logit;
}

}  // namespace

void DetectorConfig::validate() const {
  if (image_size < 16) fail(ErrorCode::Config, "detector needs image_size >= 16");
  if (widths.size() != 4) fail(ErrorCode::Config, "detector uses exactly 4 conv stages");
  if (learning_rate <= 0 || epochs < 1) fail(ErrorCode::Config, "bad detector hyperparameters");
  if (val_fraction < 0 || test_fraction <= 0 || val_fraction + test_fraction >= 1)
    fail(ErrorCode::Config, "bad detector split fractions");
}

TensorF highpass_residual(const TensorF& img) {
  TensorF res(img.h, img.w, 1);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      double acc = 0;
      for (int ky = -2; ky <= 2; ++ky)
        for (int kx = -2; kx <= 2; ++kx) {
          int iy = std::clamp(y + ky, 0, img.h - 1);
          int ix = std::clamp(x + kx, 0, img.w - 1);
          double lum = 0.299 * img.at(iy, ix, 0) + 0.587 * img.at(iy, ix, 1) +
                       0.114 * img.at(iy, ix, 2);
          acc += kKv[ky + 2][kx + 2] * lum;
        }
      res.at(y, x, 0) = float(acc / 12.0);
    }
  return res;
}

double Detector::predict(const TensorF& img) const {
  TensorF res = highpass_residual(img);
  float logit = forward_pass(*this, res, nullptr);
  return 1.0 / (1.0 + std::exp(-double(logit)));
}

Detector train_detector(const std::vector<TensorF>& covers, const std::vector<TensorF>& stegos,
                        const DetectorConfig& cfg, DetectorSplit* split_out) {
  cfg.validate();
  const size_t nc = covers.size(), ns = stegos.size();
  if (nc == 0 || ns == 0) fail(ErrorCode::Config, "empty cover or stego set");
  double ratio = double(std::min(nc, ns)) / double(nc + ns);
  if (ratio < 0.4)
    fail(ErrorCode::Config, "cover/stego class imbalance beyond 60/40: " +
                                std::to_string(nc) + " vs " + std::to_string(ns));
  const size_t pairs = std::min(nc, ns);

  // Pair-level split, deterministic under seed.
  std::vector<size_t> order(pairs);
  for (size_t i = 0; i < pairs; ++i) order[i] = i;
  Rng rng(hash_combine(cfg.seed, 0xdec7ULL));
  for (size_t i = pairs - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  size_t n_test = std::max<size_t>(1, size_t(cfg.test_fraction * pairs));
  size_t n_val = std::max<size_t>(1, size_t(cfg.val_fraction * (pairs - n_test)));
  DetectorSplit split;
  split.test.assign(order.begin(), order.begin() + n_test);
  split.val.assign(order.begin() + n_test, order.begin() + n_test + n_val);
  split.train.assign(order.begin() + n_test + n_val, order.end());
  if (split.train.empty()) fail(ErrorCode::Config, "too few pairs to train a detector");

  // Precompute residuals once.
  std::vector<TensorF> res_cover(pairs), res_stego(pairs);
  for (size_t i = 0; i < pairs; ++i) {
    res_cover[i] = highpass_residual(covers[i]);
    res_stego[i] = highpass_residual(stegos[i]);
  }

  Detector det;
  det.cfg = cfg;
  det.stages.resize(4);
  int cin = 1;
  for (int i = 0; i < 4; ++i) {
    // fan-in scaled init keeps activation magnitudes stable across stages
    det.stages[i].init(cin, cfg.widths[i], 3, 2, 1, rng, std::sqrt(2.0 / (9.0 * cin)));
    cin = cfg.widths[i];
  }
  det.head_w.assign(2 * cfg.widths.back(), 0.0f);
  for (auto& w : det.head_w) w = float(rng.gaussian() * 0.1);
  det.head_b = 0;

  // Items: (pair, is_stego, label). In the no-signal control the labels are
  // shuffled on the train and validation items so that neither the fit nor
  // the best-epoch selection ever sees a true label; test labels stay true.
  struct Item {
    size_t pair;
    int is_stego;
    int label;
  };
  std::vector<Item> items, val_items;
  for (size_t p : split.train) {
    items.push_back({p, 0, 0});
    items.push_back({p, 1, 1});
  }
  for (size_t p : split.val) {
    val_items.push_back({p, 0, 0});
    val_items.push_back({p, 1, 1});
  }
  if (cfg.shuffle_labels) {
    for (auto& it : items) it.label = rng.coin() ? 1 : 0;
    for (auto& it : val_items) it.label = rng.coin() ? 1 : 0;
  }

  // Flat Adam over all trainable arrays.
  struct Flat {
    std::vector<float*> ptr;
    std::vector<float> g, m, v;
  } flat;
  auto add_array = [&](float* p, size_t n) {
    for (size_t i = 0; i < n; ++i) flat.ptr.push_back(p + i);
  };
  for (int i = 0; i < 4; ++i) {
    add_array(det.stages[i].w.data(), det.stages[i].w.size());
    add_array(det.stages[i].b.data(), det.stages[i].b.size());
  }
  add_array(det.head_w.data(), det.head_w.size());
  add_array(&det.head_b, 1);
  flat.g.assign(flat.ptr.size(), 0);
  flat.m.assign(flat.ptr.size(), 0);
  flat.v.assign(flat.ptr.size(), 0);

  double best_val_acc = -1;
  Detector best = det;
  uint64_t t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng erng(hash_combine(cfg.seed, hash_combine(0xe11aULL, epoch)));
    std::vector<size_t> idx(items.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[erng.below(i + 1)]);

    for (size_t ii : idx) {
      const Item& it = items[ii];
      const TensorF& res = it.is_stego ? res_stego[it.pair] : res_cover[it.pair];
      ForwardCache fc;
      float logit = forward_pass(det, res, &fc);
      double p = 1.0 / (1.0 + std::exp(-double(logit)));
      float dlogit = float(p - it.label);

      // Backward.
      std::fill(flat.g.begin(), flat.g.end(), 0.0f);
      size_t gpos = 0;
      struct GradView {
        std::vector<MatRM<float>> w;
        std::vector<VecX<float>> b;
      } gv;
      gv.w.resize(4);
      gv.b.resize(4);

      const TensorF& last = fc.stages.back().act_in;
      TensorF act = leaky_relu_forward(last, 0.2);
      TensorF gcur(last.h, last.w, last.c);
      const float inv_n = 1.0f / float(last.h * last.w);
      std::vector<float> gpool(det.head_w.size());
      for (size_t c = 0; c < det.head_w.size(); ++c) gpool[c] = dlogit * det.head_w[c];
      for (int y = 0; y < gcur.h; ++y)
        for (int x = 0; x < gcur.w; ++x)
          for (int c = 0; c < gcur.c; ++c)
            gcur.at(y, x, c) =
                (gpool[c] + gpool[gcur.c + c] * 2.0f * act.at(y, x, c)) * inv_n;

      std::vector<float> ghead_w(det.head_w.size());
      for (size_t c = 0; c < det.head_w.size(); ++c) ghead_w[c] = dlogit * fc.pooled[c];
      float ghead_b = dlogit;

      for (int i = 3; i >= 0; --i) {
        auto& sc = fc.stages[i];
        TensorF g_conv = leaky_relu_backward(sc.act_in, gcur, 0.2);
        conv_backward_weight(sc.x, g_conv, 3, 2, 1, gv.w[i], gv.b[i]);
        if (i > 0)
          gcur = conv_backward_data(g_conv, det.stages[i].w, sc.x.h, sc.x.w, sc.x.c, 3, 2, 1);
      }

      auto put = [&](const float* p, size_t n) {
        for (size_t i = 0; i < n; ++i) flat.g[gpos++] = p[i];
      };
      for (int i = 0; i < 4; ++i) {
        put(gv.w[i].data(), gv.w[i].size());
        put(gv.b[i].data(), gv.b[i].size());
      }
      put(ghead_w.data(), ghead_w.size());
      put(&ghead_b, 1);

      ++t;
      const double bc1 = 1.0 - std::pow(0.9, double(t));
      const double bc2 = 1.0 - std::pow(0.999, double(t));
      for (size_t i = 0; i < flat.ptr.size(); ++i) {
        double g = flat.g[i];
        flat.m[i] = float(0.9 * flat.m[i] + 0.1 * g);
        flat.v[i] = float(0.999 * flat.v[i] + 0.001 * g * g);
        *flat.ptr[i] -= float(cfg.learning_rate * (flat.m[i] / bc1) /
                              (std::sqrt(flat.v[i] / bc2) + 1e-8));
      }
    }

    // Validation accuracy for best-epoch selection (shuffled labels in the
    // control, so selection cannot leak the truth).
    size_t correct = 0, total = 0;
    for (const Item& it : val_items) {
      const TensorF& res = it.is_stego ? res_stego[it.pair] : res_cover[it.pair];
      float logit = forward_pass(det, res, nullptr);
      correct += (logit > 0) == (it.label == 1) ? 1 : 0;
      ++total;
    }
    double acc = total ? double(correct) / double(total) : 0.0;
    if (acc > best_val_acc) {
      best_val_acc = acc;
      best = det;
    }
  }

  if (split_out) *split_out = split;
  return best;
}

double detector_accuracy(const Detector& det, const std::vector<TensorF>& covers,
                         const std::vector<TensorF>& stegos,
                         const std::vector<size_t>& pair_indices) {
  if (pair_indices.empty()) fail(ErrorCode::Config, "empty detector test set");
  size_t correct = 0;
  for (size_t p : pair_indices) {
    if (det.predict(covers[p]) <= 0.5) ++correct;
    if (det.predict(stegos[p]) > 0.5) ++correct;
  }
  return double(correct) / double(2 * pair_indices.size());
}

}  // namespace hdh

#pragma once

#include <string>
#include <vector>

#include "layers.hpp"
#include "tensor.hpp"

namespace hdh {

// Lightweight cover-vs-stego detector: a fixed (non-trainable) 5x5 high-pass
// residual filter on luminance, four small stride-2 conv stages, global
// average pooling and a linear head. The stages are deliberately
// unnormalized; per-image normalization would erase the residual-energy
// signal the detector feeds on.
struct DetectorConfig {
  int image_size = 128;
  std::vector<int> widths = {8, 16, 32, 64};
  double learning_rate = 1e-3;
  int epochs = 15;
  uint64_t seed = 1;
  double val_fraction = 0.10;   // of the training portion
  double test_fraction = 0.20;
  bool shuffle_labels = false;  // no-signal control

  void validate() const;
};

struct Detector {
  DetectorConfig cfg;
  std::vector<ConvLayer<float>> stages;
  std::vector<float> head_w;
  float head_b = 0;

  // Probability that `img` (normalized RGB) is a stego image.
  double predict(const TensorF& img) const;
};

// Fixed 5x5 high-pass residual of the luminance channel.
TensorF highpass_residual(const TensorF& img);

struct DetectorSplit {
  std::vector<size_t> train, val, test;  // pair indices
};

// Trains on (cover, stego) pairs; both images of a pair stay on the same
// side of the split. Deterministic under cfg.seed.
Detector train_detector(const std::vector<TensorF>& covers, const std::vector<TensorF>& stegos,
                        const DetectorConfig& cfg, DetectorSplit* split_out = nullptr);

// Fraction of correctly classified images over the given pair indices.
double detector_accuracy(const Detector& det, const std::vector<TensorF>& covers,
                         const std::vector<TensorF>& stegos,
                         const std::vector<size_t>& pair_indices);

}  // namespace hdh

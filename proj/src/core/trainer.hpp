#pragma once

#include <string>
#include <vector>

#include "adam.hpp"
#include "checkpoint.hpp"
#include "codec.hpp"
#include "dataset.hpp"
#include "losses.hpp"
#include "style.hpp"
#include "unet.hpp"

namespace hdh {

struct TrainConfig {
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int batch_size = 1;
  int epochs = 10;
  int block_size = 8;
  LossConfig loss;
  std::vector<double> noise_sigmas;  // empty -> clean extraction input
  uint64_t seed = 1;
  uint64_t checkpoint_interval = 0;  // steps; 0 disables mid-run snapshots
  NetworkSpec spec;
  StyleSource style;
  BitSymbols bit_symbols = BitSymbols::PlusMinusOne;
  float trigger_value = -1.0f;
  std::string output_dir;

  void validate() const;
};

struct StepBreakdown {
  double l_style = 0, l_fidelity = 0, l_extract = 0, l_total = 0;
};

struct EpochVal {
  int epoch = 0;
  double ber = 1.0, stego_psnr = 0.0, style_psnr = 0.0;
};

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const DatasetSplit& split);

  // Resume from output_dir/last (weights + optimizer state + step counter).
  void resume();

  // One optimizer update covering all three tasks for one batch. The batch
  // content is derived deterministically from (seed, step).
  StepBreakdown train_step();

  // Full run; writes train_log.csv plus best/ and last/ checkpoints under
  // output_dir, and returns the per-epoch validation history.
  std::vector<EpochVal> train();

  EpochVal validate_epoch(int epoch) const;

  uint64_t step() const { return step_; }
  const UNet<float>& net() const { return net_; }
  UNet<float>& net() { return net_; }
  Checkpoint snapshot() const;
  uint64_t steps_per_epoch() const;

  // Inference helpers shared with evaluation and the C API.
  static TensorF embed(UNet<float>& net, const TensorF& cover, const BitString& bits,
                       int block_size, BitSymbols symbols);
  static BitString extract(UNet<float>& net, const TensorF& stego, int block_size,
                           float trigger_value);

 private:
  void save_state(const std::string& dir) const;
  void load_state(const std::string& dir);

  TrainConfig cfg_;
  DatasetSplit split_;
  UNet<float> net_;
  Adam<float> adam_;
  UNetGrads<float> grads_;
  TensorF style_y_;
  TensorF trigger_;
  uint64_t step_ = 0;
};

}  // namespace hdh

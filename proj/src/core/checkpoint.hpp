#pragma once

#include <optional>
#include <string>

#include "codec.hpp"
#include "style.hpp"
#include "unet.hpp"

namespace hdh {

// A checkpoint directory holds:
//   manifest.json  - architecture fingerprint, spec fields, codec/style setup
//   weights.bin    - float32 parameter blob (plus batchnorm running stats)
// Training additionally writes optimizer.bin for exact resume.
struct Checkpoint {
  UNet<float> net;
  StyleParams style;
  BitSymbols bit_symbols = BitSymbols::PlusMinusOne;
  float trigger_value = -1.0f;
  int block_size = 8;  // block size the model was trained with
  uint64_t train_step = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);
Checkpoint load_checkpoint(const std::string& dir);

// Weight blob only (shared by checkpoint and optimizer-state files).
void write_weight_blob(const UNet<float>& net, const std::string& path,
                       const std::string& fingerprint);
void read_weight_blob(UNet<float>& net, const std::string& path,
                      const std::string& fingerprint);

}  // namespace hdh

#pragma once

#include <string>

#include "trainer.hpp"

namespace hdh {

// Flat key=value run configuration (one key per line, '#' comments).
// Unknown keys are rejected with the offending key name.
struct RunConfig {
  TrainConfig train;
  std::string dataset_dir;
  std::string manifest;  // alternative to dataset_dir
  double ratio_train = 0.8, ratio_val = 0.1, ratio_test = 0.1;
  uint64_t split_seed = 7;

  // Resolves the dataset (ingesting if needed) and returns the split.
  DatasetSplit resolve_split() const;
};

RunConfig parse_run_config(const std::string& path);

// Default channel schedule: 64 doubling to 512, capped, for log2(S) stages.
std::vector<int> default_down_channels(int image_size);

}  // namespace hdh

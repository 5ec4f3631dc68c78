#pragma once

#include <string>
#include <vector>

#include "tensor.hpp"

namespace hdh {

struct DatasetSplit {
  std::string root;
  int image_size = 128;
  uint64_t seed = 0;
  std::vector<std::string> train, validation, test;

  size_t total() const { return train.size() + validation.size() + test.size(); }
};

// Scans `directory` for decodable RGB images and splits them deterministically
// under `seed`. Requires at least 10 decodable images.
DatasetSplit ingest_dataset(const std::string& directory, int image_size, double r_train,
                            double r_val, double r_test, uint64_t seed);

void save_manifest(const DatasetSplit& split, const std::string& path);
DatasetSplit load_manifest(const std::string& path);

// Loads one split member, resized to the split's image size, normalized.
TensorF load_split_image(const DatasetSplit& split, const std::string& id);

// Procedural dataset generator for desk-scale experiments: textured images
// with gradients, blobs and band-limited noise.
void synthesize_dataset(const std::string& directory, int count, int image_size, uint64_t seed);

}  // namespace hdh

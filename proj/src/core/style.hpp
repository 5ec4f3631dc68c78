#pragma once

#include <array>
#include <string>

#include "tensor.hpp"

namespace hdh {

// Deterministic channel-mixing + gamma transform used to generate style
// ground truths. Defaults are a sepia-style mix.
struct StyleParams {
  std::array<double, 9> matrix = {0.393, 0.769, 0.189,   // r' row
                                  0.349, 0.686, 0.168,   // g' row
                                  0.272, 0.534, 0.131};  // b' row
  std::array<double, 3> gamma = {0.9, 1.0, 1.1};

  void validate() const;
};

enum class StyleMode { Builtin, ExternalDirectory };

struct StyleSource {
  StyleMode mode = StyleMode::Builtin;
  StyleParams params;
  std::string external_dir;  // mirrors dataset filenames, required in external mode
};

// Map x from [-1,1] to [0,1], apply the channel mix, clamp, apply the
// per-channel gamma, map back to [-1,1].
TensorF reference_transform(const TensorF& x, const StyleParams& params);

// Fixed procedural base image; the style image y is its transform, so y
// genuinely exhibits the target style.
TensorF canonical_base_image(int size);
TensorF style_image(int size, const StyleParams& params);

// Ground truth z_g for a training image. Builtin mode transforms x itself;
// external mode loads <external_dir>/<image_id>.
TensorF ground_truth_for(const std::string& image_id, const TensorF& x,
                         const StyleSource& source, int size);

}  // namespace hdh

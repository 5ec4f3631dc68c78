#include "style.hpp"

#include <cmath>
#include <filesystem>

#include "errors.hpp"
#include "image.hpp"

namespace hdh {

void StyleParams::validate() const {
  // Reject a degenerate mix that collapses the image to a constant.
  double det = matrix[0] * (matrix[4] * matrix[8] - matrix[5] * matrix[7]) -
               matrix[1] * (matrix[3] * matrix[8] - matrix[5] * matrix[6]) +
               matrix[2] * (matrix[3] * matrix[7] - matrix[4] * matrix[6]);
  double mag = 0.0;
  for (double m : matrix) mag += std::abs(m);
  if (mag < 1e-9) fail(ErrorCode::Config, "style matrix is zero");
  (void)det;  // near-singular mixes are allowed; only the all-zero mix is rejected
  for (double g : gamma)
    if (g <= 0.0) fail(ErrorCode::Config, "style gamma values must be positive");
}

TensorF reference_transform(const TensorF& x, const StyleParams& params) {
  params.validate();
  TensorF out(x.h, x.w, x.c);
  for (int y = 0; y < x.h; ++y)
    for (int xx = 0; xx < x.w; ++xx) {
      double in[3], mixed[3];
      for (int c = 0; c < 3; ++c) in[c] = (double(x.at(y, xx, c)) + 1.0) * 0.5;
      for (int c = 0; c < 3; ++c) {
        double v = params.matrix[c * 3 + 0] * in[0] + params.matrix[c * 3 + 1] * in[1] +
                   params.matrix[c * 3 + 2] * in[2];
        mixed[c] = std::min(1.0, std::max(0.0, v));
      }
      for (int c = 0; c < 3; ++c)
        out.at(y, xx, c) = float(std::pow(mixed[c], params.gamma[c]) * 2.0 - 1.0);
    }
  return out;
}

TensorF canonical_base_image(int size) {
  // Smooth multi-frequency pattern; fixed for all runs.
  TensorF img(size, size, 3);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double u = double(x) / size, v = double(y) / size;
      double r = 0.5 + 0.4 * std::sin(2.0 * M_PI * (u + 0.3 * v)) * std::cos(3.0 * M_PI * v);
      double g = 0.5 + 0.4 * std::cos(2.0 * M_PI * (v + 0.2 * u));
      double b = 0.5 + 0.4 * std::sin(4.0 * M_PI * u * v + 1.0);
      img.at(y, x, 0) = float(r * 2.0 - 1.0);
      img.at(y, x, 1) = float(g * 2.0 - 1.0);
      img.at(y, x, 2) = float(b * 2.0 - 1.0);
    }
  return img;
}

TensorF style_image(int size, const StyleParams& params) {
  return reference_transform(canonical_base_image(size), params);
}

TensorF ground_truth_for(const std::string& image_id, const TensorF& x,
                         const StyleSource& source, int size) {
  if (source.mode == StyleMode::Builtin) return reference_transform(x, source.params);
  std::filesystem::path p = std::filesystem::path(source.external_dir) / image_id;
  if (!std::filesystem::exists(p))
    fail(ErrorCode::Io, "missing ground-truth image: " + p.string());
  return load_normalized(p.string(), size);
}

}  // namespace hdh

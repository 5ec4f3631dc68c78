#pragma once

#include <string>
#include <vector>

#include "tensor.hpp"

namespace hdh {

// 8-bit RGB image as stored on disk.
struct RawImage {
  int height = 0, width = 0;
  std::vector<uint8_t> pixels;  // HWC, RGB

  RawImage() = default;
  RawImage(int h, int w) : height(h), width(w), pixels(size_t(h) * w * 3, 0) {}

  uint8_t& at(int y, int x, int c) { return pixels[(size_t(y) * width + x) * 3 + c]; }
  uint8_t at(int y, int x, int c) const { return pixels[(size_t(y) * width + x) * 3 + c]; }
};

// v -> v/127.5 - 1, into the network's [-1, 1] domain.
TensorF normalize(const RawImage& raw);

// v -> round((v+1)*127.5), clamped to [0, 255].
RawImage denormalize(const TensorF& t);

RawImage load_image(const std::string& path);
void save_png(const std::string& path, const RawImage& img);
RawImage resize_bilinear(const RawImage& img, int size);

// Convenience: load, resize to size x size, normalize.
TensorF load_normalized(const std::string& path, int size);

}  // namespace hdh

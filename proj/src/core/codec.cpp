#include "codec.hpp"

#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace hdh {

int actual_length(int image_size, int block_size) {
  if (block_size <= 0 || image_size % block_size != 0)
    fail(ErrorCode::Config, "block size " + std::to_string(block_size) +
                                " must divide image size " + std::to_string(image_size));
  int blocks = image_size / block_size;
  return blocks * blocks;
}

TensorF encode_plane(const BitString& bits, int image_size, int block_size,
                     BitSymbols encoding) {
  const int al = actual_length(image_size, block_size);
  if (int(bits.size()) != al)
    fail(ErrorCode::Capacity, "payload is " + std::to_string(bits.size()) +
                                  " bits but the plane carries exactly " + std::to_string(al));
  const int nb = image_size / block_size;
  const float s0 = bit0_symbol(encoding), s1 = bit1_symbol(encoding);
  TensorF plane(image_size, image_size, 3);
  for (int by = 0; by < nb; ++by)
    for (int bx = 0; bx < nb; ++bx) {
      const float val = bits[by * nb + bx] ? s1 : s0;
      for (int y = by * block_size; y < (by + 1) * block_size; ++y)
        for (int x = bx * block_size; x < (bx + 1) * block_size; ++x)
          for (int c = 0; c < 3; ++c) plane.at(y, x, c) = val;
    }
  return plane;
}

BitString decode_plane(const TensorF& plane, int block_size) {
  if (plane.h != plane.w || plane.c != 3)
    fail(ErrorCode::Shape, "decode_plane expects a square 3-channel tensor");
  const int nb = plane.h / block_size;
  if (nb * block_size != plane.h)
    fail(ErrorCode::Config, "block size must divide the plane size");
  BitString bits(size_t(nb) * nb);
  for (int by = 0; by < nb; ++by)
    for (int bx = 0; bx < nb; ++bx) {
      double sum = 0.0;
      for (int y = by * block_size; y < (by + 1) * block_size; ++y)
        for (int x = bx * block_size; x < (bx + 1) * block_size; ++x)
          for (int c = 0; c < 3; ++c) sum += plane.at(y, x, c);
      const double mean = sum / (3.0 * block_size * block_size);
      bits[by * nb + bx] = mean > 0.0 ? 1 : 0;  // tie reads as 0
    }
  return bits;
}

TensorF make_trigger(int image_size, float value) {
  TensorF t(image_size, image_size, 3);
  t.fill(value);
  return t;
}

BitString bytes_to_bits(const std::vector<uint8_t>& payload) {
  BitString bits;
  bits.reserve(payload.size() * 8);
  for (uint8_t b : payload)
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  return bits;
}

std::vector<uint8_t> bits_to_bytes(const BitString& bits) {
  std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= uint8_t(1u << (7 - i % 8));
  return out;
}

BitString random_bits(int n, uint64_t seed) {
  Rng rng(seed);
  BitString bits(n);
  for (auto& b : bits) b = rng.coin() ? 1 : 0;
  return bits;
}

}  // namespace hdh

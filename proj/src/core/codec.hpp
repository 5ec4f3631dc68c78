#pragma once

#include <cstdint>
#include <vector>

#include "tensor.hpp"

namespace hdh {

using BitString = std::vector<uint8_t>;  // entries are 0 or 1

// Symbol values written into message-plane blocks, in the normalized
// [-1, 1] domain. PlusMinusOne gives both bit classes equal margin around
// the zero decode threshold; ZeroOne follows the literal 0/1 convention.
enum class BitSymbols { PlusMinusOne, ZeroOne };

inline float bit0_symbol(BitSymbols e) { return e == BitSymbols::PlusMinusOne ? -1.0f : 0.0f; }
inline float bit1_symbol(BitSymbols) { return 1.0f; }

// Payload capacity in bits: (S/N)^2, one bit per N x N x 3 block.
int actual_length(int image_size, int block_size);

// Fills (S/N)^2 constant blocks in row-major order; block (i, j) carries
// bit i*(S/N) + j.
TensorF encode_plane(const BitString& bits, int image_size, int block_size,
                     BitSymbols encoding = BitSymbols::PlusMinusOne);

// Per block: mean of all 3*N*N values; mean > 0 reads as 1, otherwise 0.
BitString decode_plane(const TensorF& plane, int block_size);

// All-black trigger image (constant -1 in the normalized domain).
TensorF make_trigger(int image_size, float value = -1.0f);

BitString bytes_to_bits(const std::vector<uint8_t>& payload);  // MSB-first
std::vector<uint8_t> bits_to_bytes(const BitString& bits);     // zero-pads the last byte

BitString random_bits(int n, uint64_t seed);

}  // namespace hdh

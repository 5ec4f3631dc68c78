#include "codec.hpp"

#include "doctest.h"
#include "errors.hpp"
#include "rng.hpp"

using namespace hdh;

TEST_CASE("capacity is one bit per block") {
  CHECK(actual_length(128, 1) == 16384);
  CHECK(actual_length(128, 8) == 256);
  CHECK(actual_length(128, 128) == 1);
  CHECK(actual_length(16, 4) == 16);
  CHECK_THROWS_AS(actual_length(128, 3), Error);
  CHECK_THROWS_AS(actual_length(128, 0), Error);
  CHECK_THROWS_AS(actual_length(128, 256), Error);
}

TEST_CASE("plane layout: row-major blocks, constant within a block") {
  // Bit index i*(S/N)+j fills block (i, j).
  const int s = 16, n = 4;
  BitString bits(actual_length(s, n), 0);
  bits[1] = 1;  // block row 0, col 1
  bits[9] = 1;  // block row 2, col 1
  TensorF plane = encode_plane(bits, s, n);
  CHECK(plane.at(0, 0, 0) == -1.0f);
  CHECK(plane.at(0, 5, 2) == 1.0f);
  CHECK(plane.at(3, 7, 1) == 1.0f);
  CHECK(plane.at(9, 4, 0) == 1.0f);
  CHECK(plane.at(9, 3, 0) == -1.0f);
  for (int y = 8; y < 12; ++y)
    for (int x = 4; x < 8; ++x)
      for (int c = 0; c < 3; ++c) CHECK(plane.at(y, x, c) == 1.0f);
}

TEST_CASE("round-trip is exact for every block size") {
  for (int n : {1, 2, 4, 8, 16, 32, 64, 128}) {
    const int s = 128;
    for (int trial = 0; trial < 20; ++trial) {
      BitString bits = random_bits(actual_length(s, n), hash_combine(n, trial));
      TensorF plane = encode_plane(bits, s, n);
      CHECK(decode_plane(plane, n) == bits);
    }
  }
}

TEST_CASE("decoding survives sub-threshold noise") {
  const int s = 64, n = 8;
  BitString bits = random_bits(actual_length(s, n), 99);
  TensorF plane = encode_plane(bits, s, n);
  Rng rng(123);
  for (float& v : plane.v) v += float(rng.uniform(-0.5, 0.5));
  CHECK(decode_plane(plane, n) == bits);
}

TEST_CASE("a zero-mean block reads as 0") {
  TensorF plane(8, 8, 3);
  plane.fill(0.0f);
  BitString out = decode_plane(plane, 8);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 0);
}

TEST_CASE("zero-one symbol alternative still round-trips") {
  CHECK(bit0_symbol(BitSymbols::ZeroOne) == 0.0f);
  CHECK(bit1_symbol(BitSymbols::ZeroOne) == 1.0f);
  const int s = 32, n = 4;
  BitString bits = random_bits(actual_length(s, n), 5);
  TensorF plane = encode_plane(bits, s, n, BitSymbols::ZeroOne);
  CHECK(decode_plane(plane, n) == bits);
}

TEST_CASE("trigger image is constant") {
  TensorF t = make_trigger(16);
  for (float v : t.v) CHECK(v == -1.0f);
  TensorF t2 = make_trigger(8, 0.25f);
  for (float v : t2.v) CHECK(v == 0.25f);
}

TEST_CASE("bit packing is MSB-first") {
  BitString bits = bytes_to_bits({0xA5});
  CHECK(bits == BitString{1, 0, 1, 0, 0, 1, 0, 1});
  CHECK(bits_to_bytes(bits) == std::vector<uint8_t>{0xA5});
  // partial byte zero-pads on the right
  CHECK(bits_to_bytes({1, 1, 1}) == std::vector<uint8_t>{0xE0});
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng(trial);
    std::vector<uint8_t> bytes(1 + rng.below(64));
    for (auto& b : bytes) b = uint8_t(rng.below(256));
    CHECK(bits_to_bytes(bytes_to_bits(bytes)) == bytes);
  }
}

TEST_CASE("encode rejects wrong payload length") {
  BitString bits(255, 0);
  CHECK_THROWS_AS(encode_plane(bits, 128, 8), Error);
}

#include "rs.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "errors.hpp"
#include "rng.hpp"

using namespace hdh;

namespace {

std::vector<uint8_t> random_bytes(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<uint8_t> v(n);
  for (auto& b : v) b = uint8_t(rng.below(256));
  return v;
}

// Corrupts `count` distinct byte positions, guaranteeing each changes value.
void inject_errors(std::vector<uint8_t>& cw, int count, uint64_t seed) {
  Rng rng(seed);
  std::set<size_t> positions;
  while (int(positions.size()) < count) positions.insert(rng.below(cw.size()));
  for (size_t p : positions) cw[p] ^= uint8_t(1 + rng.below(255));
}

}  // namespace

TEST_CASE("encoding is systematic") {
  auto msg = random_bytes(223, 7);
  auto cw = rs_encode_block(msg, 255, 223);
  REQUIRE(cw.size() == 255);
  CHECK(std::equal(msg.begin(), msg.end(), cw.begin()));
}

TEST_CASE("corrects up to 16 byte errors, flags 17") {
  for (int trial = 0; trial < 100; ++trial) {
    auto msg = random_bytes(223, hash_combine(11, trial));
    auto cw = rs_encode_block(msg, 255, 223);

    auto corrupted = cw;
    inject_errors(corrupted, 1 + trial % 16, hash_combine(13, trial));
    auto fixed = rs_decode_block(corrupted, 255, 223);
    REQUIRE(fixed.has_value());
    CHECK(*fixed == msg);

    auto too_far = cw;
    inject_errors(too_far, 17 + trial % 8, hash_combine(17, trial));
    auto failed = rs_decode_block(too_far, 255, 223);
    CHECK(!failed.has_value());
  }
}

TEST_CASE("clean codewords decode unchanged") {
  auto msg = random_bytes(223, 3);
  auto cw = rs_encode_block(msg, 255, 223);
  auto out = rs_decode_block(cw, 255, 223);
  REQUIRE(out.has_value());
  CHECK(*out == msg);
}

TEST_CASE("other (n, k) shapes work") {
  auto msg = random_bytes(11, 5);
  auto cw = rs_encode_block(msg, 15, 11);
  REQUIRE(cw.size() == 15);
  auto bent = cw;
  bent[2] ^= 0x40;
  bent[14] ^= 0x01;
  auto out = rs_decode_block(bent, 15, 11);
  REQUIRE(out.has_value());
  CHECK(*out == msg);
}

TEST_CASE("stream coding chunks and pads") {
  EccConfig cfg{EccScheme::ReedSolomon, 255, 223};
  auto payload = random_bytes(500, 21);  // 3 chunks, last padded
  auto coded = ecc_encode(payload, cfg);
  CHECK(coded.size() == 3 * 255);
  inject_errors(coded, 10, 23);
  auto back = ecc_decode(coded, cfg);
  REQUIRE(back.has_value());
  REQUIRE(back->size() >= payload.size());
  CHECK(std::equal(payload.begin(), payload.end(), back->begin()));
}

TEST_CASE("scheme none is a pass-through") {
  EccConfig cfg;
  auto payload = random_bytes(64, 31);
  CHECK(ecc_encode(payload, cfg) == payload);
  auto back = ecc_decode(payload, cfg);
  REQUIRE(back.has_value());
  CHECK(*back == payload);
}

TEST_CASE("framing stores a big-endian length") {
  std::vector<uint8_t> payload{0xDE, 0xAD};
  auto framed = frame_payload(payload);
  REQUIRE(framed.size() == 6);
  CHECK(framed[0] == 0);
  CHECK(framed[3] == 2);
  auto back = unframe_payload(framed);
  REQUIRE(back.has_value());
  CHECK(*back == payload);

  // trailing pad bytes after the declared length are fine
  framed.push_back(0);
  framed.push_back(0);
  back = unframe_payload(framed);
  REQUIRE(back.has_value());
  CHECK(*back == payload);

  // declared length beyond the buffer is not
  framed[3] = 200;
  CHECK(!unframe_payload(framed).has_value());
  CHECK(!unframe_payload({0x01}).has_value());
}

TEST_CASE("zero-length payload round-trips") {
  EccConfig cfg{EccScheme::ReedSolomon, 255, 223};
  auto framed = frame_payload({});
  auto coded = ecc_encode(framed, cfg);
  auto decoded = ecc_decode(coded, cfg);
  REQUIRE(decoded.has_value());
  auto back = unframe_payload(*decoded);
  REQUIRE(back.has_value());
  CHECK(back->empty());
}

TEST_CASE("bad parameters are rejected") {
  EccConfig cfg{EccScheme::ReedSolomon, 255, 255};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {EccScheme::ReedSolomon, 300, 223};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {EccScheme::ReedSolomon, 255, 0};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

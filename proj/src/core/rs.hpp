#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hdh {

enum class EccScheme { None, ReedSolomon };

struct EccConfig {
  EccScheme scheme = EccScheme::None;
  int rs_n = 255;  // codeword bytes
  int rs_k = 223;  // message bytes

  int correctable() const { return (rs_n - rs_k) / 2; }
  void validate() const;
};

// Systematic Reed-Solomon over GF(2^8), primitive polynomial 0x11D.
// encode returns message || parity per rs_k-byte chunk (the last chunk is
// zero-padded before encoding). decode corrects up to (rs_n - rs_k)/2 byte
// errors per codeword and returns nullopt on an uncorrectable codeword.
std::vector<uint8_t> rs_encode_block(const std::vector<uint8_t>& msg, int n, int k);
std::optional<std::vector<uint8_t>> rs_decode_block(const std::vector<uint8_t>& codeword, int n,
                                                    int k);

std::vector<uint8_t> ecc_encode(const std::vector<uint8_t>& payload, const EccConfig& cfg);
std::optional<std::vector<uint8_t>> ecc_decode(const std::vector<uint8_t>& data,
                                               const EccConfig& cfg);

// Payload framing used by embed/extract: a 4-byte big-endian length header
// followed by the payload, then ECC. unframe validates the header against
// the available bytes.
std::vector<uint8_t> frame_payload(const std::vector<uint8_t>& payload);
std::optional<std::vector<uint8_t>> unframe_payload(const std::vector<uint8_t>& framed);

}  // namespace hdh

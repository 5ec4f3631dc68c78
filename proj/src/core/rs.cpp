#include "rs.hpp"

#include <array>
#include <string>

#include "errors.hpp"

namespace hdh {
namespace {

// GF(2^8) arithmetic with primitive polynomial x^8+x^4+x^3+x^2+1 (0x11D).
struct GF256 {
  std::array<uint8_t, 512> exp{};
  std::array<uint8_t, 256> log{};

  GF256() {
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = uint8_t(x);
      log[x] = uint8_t(i);
      x <<= 1;
      if (x & 0x100) x ^= 0x11D;
    }
    for (int i = 255; i < 512; ++i) exp[i] = exp[i - 255];
  }

  uint8_t mul(uint8_t a, uint8_t b) const {
    if (a == 0 || b == 0) return 0;
    return exp[log[a] + log[b]];
  }

  uint8_t div(uint8_t a, uint8_t b) const {
    if (a == 0) return 0;
    return exp[(log[a] + 255 - log[b]) % 255];
  }

  uint8_t pow(uint8_t a, int p) const {
    if (a == 0) return 0;
    return exp[(log[a] * p % 255 + 255) % 255];
  }

  uint8_t inv(uint8_t a) const { return exp[255 - log[a]]; }
};

const GF256& gf() {
  static const GF256 table;
  return table;
}

using Poly = std::vector<uint8_t>;  // coefficients, lowest degree first

uint8_t poly_eval(const Poly& p, uint8_t x) {
  uint8_t y = 0;
  for (int i = int(p.size()) - 1; i >= 0; --i) y = uint8_t(gf().mul(y, x) ^ p[i]);
  return y;
}

// Generator polynomial: product of (x - alpha^i), i in [0, n-k).
Poly rs_generator(int nparity) {
  Poly g = {1};
  for (int i = 0; i < nparity; ++i) {
    Poly ng(g.size() + 1, 0);
    uint8_t root = gf().exp[i];
    for (size_t j = 0; j < g.size(); ++j) {
      ng[j + 1] ^= g[j];
      ng[j] ^= gf().mul(g[j], root);
    }
    g = std::move(ng);
  }
  return g;
}

}  // namespace

void EccConfig::validate() const {
  if (scheme == EccScheme::None) return;
  if (!(0 < rs_k && rs_k < rs_n && rs_n <= 255))
    fail(ErrorCode::Config, "Reed-Solomon requires 0 < rs_k < rs_n <= 255, got n=" +
                                std::to_string(rs_n) + " k=" + std::to_string(rs_k));
}

std::vector<uint8_t> rs_encode_block(const std::vector<uint8_t>& msg, int n, int k) {
  const int nparity = n - k;
  const Poly g = rs_generator(nparity);
  // Polynomial long division of msg * x^nparity by g; remainder is parity.
  std::vector<uint8_t> rem(nparity, 0);
  for (int i = 0; i < k; ++i) {
    uint8_t coef = uint8_t(msg[i] ^ rem[nparity - 1]);
    for (int j = nparity - 1; j > 0; --j)
      rem[j] = uint8_t(rem[j - 1] ^ gf().mul(coef, g[j]));
    rem[0] = gf().mul(coef, g[0]);
  }
  std::vector<uint8_t> out(msg.begin(), msg.begin() + k);
  for (int j = nparity - 1; j >= 0; --j) out.push_back(rem[j]);
  return out;
}

std::optional<std::vector<uint8_t>> rs_decode_block(const std::vector<uint8_t>& cw, int n,
                                                    int k) {
  const int nparity = n - k;
  // Received polynomial with lowest degree last in cw: cw[0] is the highest
  // power. Work with r(x) where r_i = cw[n-1-i].
  auto r = [&](int i) { return cw[n - 1 - i]; };

  // Syndromes S_j = r(alpha^j), j in [0, nparity).
  std::vector<uint8_t> synd(nparity, 0);
  bool all_zero = true;
  for (int j = 0; j < nparity; ++j) {
    uint8_t x = gf().exp[j];
    uint8_t y = 0;
    for (int i = n - 1; i >= 0; --i) y = uint8_t(gf().mul(y, x) ^ r(i));
    synd[j] = y;
    if (y) all_zero = false;
  }
  if (all_zero) return std::vector<uint8_t>(cw.begin(), cw.begin() + k);

  // Berlekamp-Massey for the error locator polynomial.
  Poly sigma = {1}, prev = {1};
  int L = 0, m = 1;
  uint8_t b = 1;
  for (int i = 0; i < nparity; ++i) {
    uint8_t delta = synd[i];
    for (int j = 1; j <= L && j < int(sigma.size()); ++j)
      delta ^= gf().mul(sigma[j], synd[i - j]);
    if (delta == 0) {
      ++m;
    } else if (2 * L <= i) {
      Poly t = sigma;
      uint8_t coef = gf().div(delta, b);
      if (sigma.size() < prev.size() + m) sigma.resize(prev.size() + m, 0);
      for (size_t j = 0; j < prev.size(); ++j) sigma[j + m] ^= gf().mul(coef, prev[j]);
      L = i + 1 - L;
      prev = std::move(t);
      b = delta;
      m = 1;
    } else {
      uint8_t coef = gf().div(delta, b);
      if (sigma.size() < prev.size() + m) sigma.resize(prev.size() + m, 0);
      for (size_t j = 0; j < prev.size(); ++j) sigma[j + m] ^= gf().mul(coef, prev[j]);
      ++m;
    }
  }
  if (L > nparity / 2) return std::nullopt;  // beyond correction capability

  // Chien search for error positions.
  std::vector<int> positions;
  for (int i = 0; i < n; ++i) {
    uint8_t xinv = gf().exp[(255 - i) % 255];  // alpha^{-i}
    if (poly_eval(sigma, xinv) == 0) positions.push_back(i);
  }
  if (int(positions.size()) != L) return std::nullopt;

  // Forney: error evaluator omega = (synd * sigma) mod x^nparity.
  Poly omega(nparity, 0);
  for (int i = 0; i < nparity; ++i) {
    uint8_t acc = 0;
    for (int j = 0; j <= i && j < int(sigma.size()); ++j)
      acc ^= gf().mul(sigma[j], synd[i - j]);
    omega[i] = acc;
  }
  Poly sigma_deriv;  // formal derivative: odd-degree terms only
  for (size_t j = 1; j < sigma.size(); j += 2) {
    sigma_deriv.resize(j, 0);
    sigma_deriv[j - 1] = sigma[j];
  }

  std::vector<uint8_t> corrected = cw;
  for (int pos : positions) {
    uint8_t xinv = gf().exp[(255 - pos) % 255];
    uint8_t num = poly_eval(omega, xinv);
    uint8_t den = poly_eval(sigma_deriv, xinv);
    if (den == 0) return std::nullopt;
    // Forney with the generator's first root at alpha^0 keeps a factor X_k.
    uint8_t mag = gf().mul(gf().exp[pos % 255], gf().div(num, den));
    corrected[n - 1 - pos] ^= mag;
  }

  // Verify: all syndromes of the corrected word must vanish.
  for (int j = 0; j < nparity; ++j) {
    uint8_t x = gf().exp[j];
    uint8_t y = 0;
    for (int i = 0; i < n; ++i) y = uint8_t(gf().mul(y, x) ^ corrected[i]);
    if (y != 0) return std::nullopt;
  }
  return std::vector<uint8_t>(corrected.begin(), corrected.begin() + k);
}

std::vector<uint8_t> ecc_encode(const std::vector<uint8_t>& payload, const EccConfig& cfg) {
  cfg.validate();
  if (cfg.scheme == EccScheme::None) return payload;
  if (payload.empty()) return {};
  std::vector<uint8_t> out;
  for (size_t off = 0; off < payload.size(); off += cfg.rs_k) {
    std::vector<uint8_t> chunk(cfg.rs_k, 0);
    size_t len = std::min(size_t(cfg.rs_k), payload.size() - off);
    std::copy(payload.begin() + off, payload.begin() + off + len, chunk.begin());
    auto cw = rs_encode_block(chunk, cfg.rs_n, cfg.rs_k);
    out.insert(out.end(), cw.begin(), cw.end());
  }
  return out;
}

std::optional<std::vector<uint8_t>> ecc_decode(const std::vector<uint8_t>& data,
                                               const EccConfig& cfg) {
  cfg.validate();
  if (cfg.scheme == EccScheme::None) return data;
  std::vector<uint8_t> out;
  for (size_t off = 0; off + cfg.rs_n <= data.size(); off += cfg.rs_n) {
    std::vector<uint8_t> cw(data.begin() + off, data.begin() + off + cfg.rs_n);
    auto msg = rs_decode_block(cw, cfg.rs_n, cfg.rs_k);
    if (!msg) return std::nullopt;
    out.insert(out.end(), msg->begin(), msg->end());
  }
  return out;
}

std::vector<uint8_t> frame_payload(const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> framed;
  uint32_t len = uint32_t(payload.size());
  framed.push_back(uint8_t(len >> 24));
  framed.push_back(uint8_t(len >> 16));
  framed.push_back(uint8_t(len >> 8));
  framed.push_back(uint8_t(len));
  framed.insert(framed.end(), payload.begin(), payload.end());
  return framed;
}

std::optional<std::vector<uint8_t>> unframe_payload(const std::vector<uint8_t>& framed) {
  if (framed.size() < 4) return std::nullopt;
  uint32_t len = (uint32_t(framed[0]) << 24) | (uint32_t(framed[1]) << 16) |
                 (uint32_t(framed[2]) << 8) | uint32_t(framed[3]);
  if (framed.size() - 4 < len) return std::nullopt;
  return std::vector<uint8_t>(framed.begin() + 4, framed.begin() + 4 + len);
}

}  // namespace hdh

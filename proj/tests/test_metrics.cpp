#include "metrics.hpp"

#include "doctest.h"
#include "errors.hpp"

using namespace hdh;

namespace {

// Procedural images shared with the frozen reference values below.
RawImage pattern_a() {
  RawImage img(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = uint8_t((x * 7 + y * 13 + c * 29) % 256);
  return img;
}

RawImage pattern_b() {
  RawImage img(40, 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = uint8_t((x * 5 + y * 11 + c * 3) % 251);
  return img;
}

RawImage plus_one(RawImage img) {
  for (auto& p : img.pixels) p = uint8_t(std::min(255, int(p) + 1));
  return img;
}

}  // namespace

// Reference values computed once with scikit-image 0.19
// (structural_similarity: gaussian_weights, sigma 1.5, win_size 11,
// use_sample_covariance=False, data_range 255, channel_axis last;
// peak_signal_noise_ratio: data_range 255) on the two procedural patterns.
TEST_CASE("psnr and ssim match an independent implementation") {
  RawImage a = pattern_a(), b = pattern_b(), a1 = plus_one(pattern_a());
  CHECK(psnr(a, b) == doctest::Approx(6.666557490595).epsilon(1e-9));
  CHECK(psnr(a, a1) == doctest::Approx(48.147120264637).epsilon(1e-9));
  CHECK(ssim(a, b) == doctest::Approx(0.108078340925).epsilon(1e-6));
  CHECK(ssim(a, a1) == doctest::Approx(0.999939471188).epsilon(1e-6));
}

TEST_CASE("identical images hit the caps") {
  RawImage a = pattern_a();
  CHECK(psnr(a, a) == kPsnrCap);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("maximal difference gives 0 dB") {
  RawImage black(16, 16), white(16, 16);
  for (auto& p : white.pixels) p = 255;
  CHECK(psnr(black, white) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ssim(black, white) < 0.05);
}

TEST_CASE("inverted image scores low ssim") {
  RawImage a = pattern_a(), inv = a;
  for (auto& p : inv.pixels) p = uint8_t(255 - p);
  CHECK(ssim(a, inv) < 0.5);
}

TEST_CASE("bit error rate") {
  CHECK(ber({0, 1, 0, 1}, {0, 1, 0, 1}) == 0.0);
  CHECK(ber({0, 1, 0, 1}, {1, 0, 1, 0}) == 1.0);
  CHECK(ber({0, 0, 0, 0}, {0, 0, 0, 1}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(ber({0, 1}, {0}), Error);
  CHECK_THROWS_AS(ber({}, {}), Error);
}

TEST_CASE("shape mismatch is rejected") {
  RawImage a(8, 8), b(8, 9);
  CHECK_THROWS_AS(psnr(a, b), Error);
  CHECK_THROWS_AS(ssim(a, b), Error);
}

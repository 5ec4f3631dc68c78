#include "metrics.hpp"

#include <cmath>

#include "errors.hpp"

namespace hdh {

double psnr(const RawImage& a, const RawImage& b) {
  if (a.height != b.height || a.width != b.width)
    fail(ErrorCode::Shape, "psnr inputs have mismatched shapes");
  double mse = 0.0;
  for (size_t i = 0; i < a.pixels.size(); ++i) {
    double d = double(a.pixels[i]) - double(b.pixels[i]);
    mse += d * d;
  }
  mse /= double(a.pixels.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const RawImage& a, const RawImage& b) {
  if (a.height != b.height || a.width != b.width)
    fail(ErrorCode::Shape, "ssim inputs have mismatched shapes");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  if (a.height < kWin || a.width < kWin)
    fail(ErrorCode::Shape, "image smaller than the 11x11 SSIM window");

  // Normalized separable Gaussian taps.
  double taps[kWin];
  double sum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - kWin / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;

  double total = 0.0;
  int count = 0;
  for (int c = 0; c < 3; ++c) {
    for (int wy = 0; wy + kWin <= a.height; ++wy) {
      for (int wx = 0; wx + kWin <= a.width; ++wx) {
        double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
        for (int y = 0; y < kWin; ++y)
          for (int x = 0; x < kWin; ++x) {
            double w = taps[y] * taps[x];
            double va = a.at(wy + y, wx + x, c);
            double vb = b.at(wy + y, wx + x, c);
            mu_a += w * va;
            mu_b += w * vb;
            aa += w * va * va;
            bb += w * vb * vb;
            ab += w * va * vb;
          }
        double var_a = aa - mu_a * mu_a;
        double var_b = bb - mu_b * mu_b;
        double cov = ab - mu_a * mu_b;
        double num = (2 * mu_a * mu_b + kC1) * (2 * cov + kC2);
        double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
        total += num / den;
        ++count;
      }
    }
  }
  return total / count;
}

double ber(const BitString& sent, const BitString& received) {
  if (sent.size() != received.size())
    fail(ErrorCode::Invalid, "ber inputs have mismatched lengths");
  if (sent.empty()) fail(ErrorCode::Invalid, "ber on empty bit strings");
  size_t errs = 0;
  for (size_t i = 0; i < sent.size(); ++i)
    if (sent[i] != received[i]) ++errs;
  return double(errs) / double(sent.size());
}

}  // namespace hdh

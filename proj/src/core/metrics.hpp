#pragma once

#include "codec.hpp"
#include "image.hpp"

namespace hdh {

inline constexpr double kPsnrCap = 100.0;  // dB sentinel for identical images

// 10*log10(255^2 / MSE) over all samples; identical images return the cap.
double psnr(const RawImage& a, const RawImage& b);

// Windowed SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 255, averaged over channels and window positions.
double ssim(const RawImage& a, const RawImage& b);

// Hamming distance / length.
double ber(const BitString& sent, const BitString& received);

}  // namespace hdh

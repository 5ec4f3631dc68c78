#pragma once

#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "dataset.hpp"

namespace hdh {

struct AlRecord {
  int actual_length = 0;
  int block_size = 0;
  double stego_psnr_mean = 0;
  double stego_ssim_mean = 0;
  double ber_mean = 0;
  int n_images = 0;
};

struct EvalReport {
  std::string checkpoint_fingerprint;
  uint64_t seed = 0;
  std::vector<AlRecord> records;
};

void write_report_csv(const EvalReport& report, const std::string& path);

// Table-3 style sweep: for each block size, embed fresh random payloads into
// every test cover and record mean stego PSNR/SSIM and trigger-extraction BER.
EvalReport payload_distortion_sweep(Checkpoint& ckpt, const DatasetSplit& split,
                                    const std::vector<int>& block_sizes, uint64_t seed,
                                    int max_images = 0);

// Extraction with random natural images instead of the true trigger; the mean
// BER should sit near 0.5 for a trained model.
double random_trigger_test(Checkpoint& ckpt, const DatasetSplit& split, int trials,
                           uint64_t seed);

struct StyleOnStegoResult {
  double psnr_cover_mean = 0;
  double psnr_stego_mean = 0;
  double gap() const { return std::abs(psnr_cover_mean - psnr_stego_mean); }
};

// Style-transfer quality with cover inputs vs. their stego versions, against
// the same ground truths on the same image set.
StyleOnStegoResult style_on_stego_eval(Checkpoint& ckpt, const DatasetSplit& split,
                                       const StyleSource& style, uint64_t seed,
                                       int max_images = 0);

struct NoisePoint {
  double sigma = 0;
  double ber_plain = 0;
  double ber_noise_trained = 0;
};

// BER of both models under additive Gaussian noise on stegos before
// extraction, on the same test split and payloads.
std::vector<NoisePoint> noise_robustness_eval(Checkpoint& plain, Checkpoint& noise_trained,
                                              const std::vector<double>& sigmas,
                                              const DatasetSplit& split, uint64_t seed,
                                              int max_images = 0);

}  // namespace hdh

#include "evalsuite.hpp"

#include <fstream>

#include "errors.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "trainer.hpp"

namespace hdh {
namespace {

std::vector<std::string> capped(const std::vector<std::string>& ids, int max_images) {
  if (max_images <= 0 || int(ids.size()) <= max_images) return ids;
  return std::vector<std::string>(ids.begin(), ids.begin() + max_images);
}

}  // namespace

void write_report_csv(const EvalReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write report: " + path);
  f << "# fingerprint=" << report.checkpoint_fingerprint << " seed=" << report.seed << "\n";
  f << "AL,block_size,stego_psnr_mean,stego_ssim_mean,ber_mean,n_images\n";
  for (const auto& r : report.records)
    f << r.actual_length << "," << r.block_size << "," << r.stego_psnr_mean << ","
      << r.stego_ssim_mean << "," << r.ber_mean << "," << r.n_images << "\n";
}

EvalReport payload_distortion_sweep(Checkpoint& ckpt, const DatasetSplit& split,
                                    const std::vector<int>& block_sizes, uint64_t seed,
                                    int max_images) {
  const int S = ckpt.net.spec.image_size;
  EvalReport report;
  report.checkpoint_fingerprint = ckpt.net.spec.fingerprint();
  report.seed = seed;
  auto ids = capped(split.test, max_images);
  if (ids.empty()) fail(ErrorCode::Config, "test split is empty");
  for (int n : block_sizes) {
    const int al = actual_length(S, n);
    AlRecord rec;
    rec.actual_length = al;
    rec.block_size = n;
    rec.n_images = int(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      TensorF c = load_split_image(split, ids[i]);
      BitString bits = random_bits(al, hash_combine(seed, hash_combine(n, i)));
      TensorF s = Trainer::embed(ckpt.net, c, bits, n, ckpt.bit_symbols);
      BitString got = Trainer::extract(ckpt.net, s, n, ckpt.trigger_value);
      RawImage rc = denormalize(c), rs = denormalize(s);
      rec.stego_psnr_mean += psnr(rc, rs);
      rec.stego_ssim_mean += ssim(rc, rs);
      rec.ber_mean += ber(bits, got);
    }
    rec.stego_psnr_mean /= rec.n_images;
    rec.stego_ssim_mean /= rec.n_images;
    rec.ber_mean /= rec.n_images;
    report.records.push_back(rec);
  }
  return report;
}

double random_trigger_test(Checkpoint& ckpt, const DatasetSplit& split, int trials,
                           uint64_t seed) {
  if (trials <= 0) fail(ErrorCode::Config, "random_trigger_test needs trials > 0");
  if (split.test.size() < 2) fail(ErrorCode::Config, "need at least 2 test images");
  const int S = ckpt.net.spec.image_size;
  const int al = actual_length(S, ckpt.block_size);
  Rng rng(hash_combine(seed, 0x7219ULL));
  double ber_sum = 0;
  for (int t = 0; t < trials; ++t) {
    size_t ci = rng.below(split.test.size());
    size_t ri = rng.below(split.test.size());
    if (ri == ci) ri = (ri + 1) % split.test.size();
    TensorF c = load_split_image(split, split.test[ci]);
    TensorF r = load_split_image(split, split.test[ri]);
    BitString bits = random_bits(al, rng.next_u64());
    TensorF s = Trainer::embed(ckpt.net, c, bits, ckpt.block_size, ckpt.bit_symbols);
    TensorF m_hat = ckpt.net.forward(s, r, Mode::Eval, 0, nullptr);
    ber_sum += ber(bits, decode_plane(m_hat, ckpt.block_size));
  }
  return ber_sum / trials;
}

StyleOnStegoResult style_on_stego_eval(Checkpoint& ckpt, const DatasetSplit& split,
                                       const StyleSource& style, uint64_t seed,
                                       int max_images) {
  const int S = ckpt.net.spec.image_size;
  const int al = actual_length(S, ckpt.block_size);
  TensorF y = style_image(S, ckpt.style);
  auto ids = capped(split.test, max_images);
  if (ids.empty()) fail(ErrorCode::Config, "test split is empty");
  StyleOnStegoResult res;
  for (size_t i = 0; i < ids.size(); ++i) {
    TensorF c = load_split_image(split, ids[i]);
    TensorF z_g = ground_truth_for(ids[i], c, style, S);
    RawImage raw_zg = denormalize(z_g);

    TensorF z_cover = ckpt.net.forward(c, y, Mode::Eval, 0, nullptr);
    res.psnr_cover_mean += psnr(raw_zg, denormalize(z_cover));

    BitString bits = random_bits(al, hash_combine(seed, i));
    TensorF s = Trainer::embed(ckpt.net, c, bits, ckpt.block_size, ckpt.bit_symbols);
    TensorF z_stego = ckpt.net.forward(s, y, Mode::Eval, 0, nullptr);
    res.psnr_stego_mean += psnr(raw_zg, denormalize(z_stego));
  }
  res.psnr_cover_mean /= double(ids.size());
  res.psnr_stego_mean /= double(ids.size());
  return res;
}

std::vector<NoisePoint> noise_robustness_eval(Checkpoint& plain, Checkpoint& noise_trained,
                                              const std::vector<double>& sigmas,
                                              const DatasetSplit& split, uint64_t seed,
                                              int max_images) {
  const int S = plain.net.spec.image_size;
  const int al = actual_length(S, plain.block_size);
  auto ids = capped(split.test, max_images);
  if (ids.empty()) fail(ErrorCode::Config, "test split is empty");
  std::vector<NoisePoint> points;
  for (double sigma : sigmas) {
    NoisePoint pt;
    pt.sigma = sigma;
    for (size_t i = 0; i < ids.size(); ++i) {
      TensorF c = load_split_image(split, ids[i]);
      BitString bits = random_bits(al, hash_combine(seed, hash_combine(i, 0x401eULL)));
      Rng noise_rng(hash_combine(seed, hash_combine(i, uint64_t(sigma * 1e6))));
      for (auto* ck : {&plain, &noise_trained}) {
        TensorF s = Trainer::embed(ck->net, c, bits, ck->block_size, ck->bit_symbols);
        Rng nr = noise_rng;  // same noise realization for both models
        for (auto& v : s.v) v += float(sigma * nr.gaussian());
        BitString got = Trainer::extract(ck->net, s, ck->block_size, ck->trigger_value);
        double b = ber(bits, got);
        if (ck == &plain)
          pt.ber_plain += b;
        else
          pt.ber_noise_trained += b;
      }
    }
    pt.ber_plain /= double(ids.size());
    pt.ber_noise_trained /= double(ids.size());
    points.push_back(pt);
  }
  return points;
}

}  // namespace hdh

#include "hdh.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "checkpoint.hpp"
#include "codec.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "detector.hpp"
#include "errors.hpp"
#include "evalsuite.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "rs.hpp"
#include "style.hpp"
#include "trainer.hpp"

namespace fs = std::filesystem;

namespace {

thread_local std::string g_last_error;

hdh_status set_error(hdh::ErrorCode code, const std::string& msg) {
  g_last_error = msg;
  return static_cast<hdh_status>(static_cast<int>(code));
}

template <typename Fn>
hdh_status guarded(Fn&& fn) {
  try {
    fn();
    return HDH_OK;
  } catch (const hdh::Error& e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(hdh::ErrorCode::Internal, e.what());
  }
}

hdh::EccConfig to_ecc(const hdh_ecc* ecc) {
  hdh::EccConfig cfg;
  if (ecc && ecc->scheme != 0) {
    cfg.scheme = hdh::EccScheme::ReedSolomon;
    cfg.rs_n = ecc->rs_n;
    cfg.rs_k = ecc->rs_k;
  }
  cfg.validate();
  return cfg;
}

hdh::TensorF load_exact(const std::string& path, int size, const char* what) {
  hdh::RawImage raw = hdh::load_image(path);
  if (raw.height != size || raw.width != size)
    hdh::fail(hdh::ErrorCode::Shape, std::string(what) + " must be " + std::to_string(size) +
                                         "x" + std::to_string(size) + ", got " +
                                         std::to_string(raw.width) + "x" +
                                         std::to_string(raw.height));
  return hdh::normalize(raw);
}

// Payload bits for the plane: frame, ECC, pack, zero-pad to capacity.
hdh::BitString payload_to_plane_bits(const uint8_t* payload, size_t len,
                                     const hdh::EccConfig& ecc, int capacity_bits) {
  std::vector<uint8_t> framed =
      hdh::frame_payload(std::vector<uint8_t>(payload, payload + len));
  std::vector<uint8_t> coded = hdh::ecc_encode(framed, ecc);
  hdh::BitString bits = hdh::bytes_to_bits(coded);
  if (int(bits.size()) > capacity_bits)
    hdh::fail(hdh::ErrorCode::Capacity,
              "payload needs " + std::to_string(bits.size()) + " bits but capacity is (S/N)^2 = " +
                  std::to_string(capacity_bits) + " bits");
  bits.resize(capacity_bits, 0);
  return bits;
}

std::vector<uint8_t> plane_bits_to_payload(const hdh::BitString& bits,
                                           const hdh::EccConfig& ecc) {
  std::vector<uint8_t> bytes = hdh::bits_to_bytes(bits);
  auto decoded = hdh::ecc_decode(bytes, ecc);
  if (!decoded)
    hdh::fail(hdh::ErrorCode::Ecc, "uncorrectable Reed-Solomon codeword during extraction");
  auto payload = hdh::unframe_payload(*decoded);
  if (!payload)
    hdh::fail(hdh::ErrorCode::Invalid, "malformed payload frame (wrong trigger or no payload)");
  return *payload;
}

}  // namespace

struct hdh_model {
  hdh::Checkpoint ckpt;
};

extern "C" {

const char* hdh_last_error(void) { return g_last_error.c_str(); }

const char* hdh_status_name(hdh_status status) {
  switch (status) {
    case HDH_OK: return "ok";
    case HDH_ERR_CONFIG: return "config-error";
    case HDH_ERR_IO: return "io-error";
    case HDH_ERR_CAPACITY: return "capacity-error";
    case HDH_ERR_ECC: return "ecc-failure";
    case HDH_ERR_VERIFY: return "verification-failure";
    case HDH_ERR_SHAPE: return "shape-error";
    case HDH_ERR_CHECKPOINT: return "checkpoint-error";
    case HDH_ERR_INVALID: return "invalid-input";
    case HDH_ERR_INTERNAL: return "internal-error";
  }
  return "unknown";
}

hdh_status hdh_model_load(const char* checkpoint_dir, hdh_model** out) {
  if (!checkpoint_dir || !out) return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    auto model = std::make_unique<hdh_model>();
    model->ckpt = hdh::load_checkpoint(checkpoint_dir);
    *out = model.release();
  });
}

void hdh_model_free(hdh_model* model) { delete model; }

int hdh_model_image_size(const hdh_model* model) {
  return model ? model->ckpt.net.spec.image_size : -1;
}

int hdh_model_block_size(const hdh_model* model) { return model ? model->ckpt.block_size : -1; }

int hdh_model_capacity_bits(const hdh_model* model, int block_size) {
  if (!model) return -1;
  int n = block_size > 0 ? block_size : model->ckpt.block_size;
  try {
    return hdh::actual_length(model->ckpt.net.spec.image_size, n);
  } catch (...) {
    return -1;
  }
}

hdh_status hdh_model_fingerprint(const hdh_model* model, char* buf, size_t cap) {
  if (!model || !buf) return set_error(hdh::ErrorCode::Invalid, "null argument");
  std::string fp = model->ckpt.net.spec.fingerprint();
  if (cap <= fp.size()) return set_error(hdh::ErrorCode::Invalid, "buffer too small");
  std::memcpy(buf, fp.c_str(), fp.size() + 1);
  return HDH_OK;
}

hdh_status hdh_embed(hdh_model* model, const char* cover_path, const uint8_t* payload,
                     size_t payload_len, int block_size, const hdh_ecc* ecc, int verify,
                     const char* stego_png_out) {
  if (!model || !cover_path || (!payload && payload_len) || !stego_png_out)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint& ckpt = model->ckpt;
    const int S = ckpt.net.spec.image_size;
    const int n = block_size > 0 ? block_size : ckpt.block_size;
    const int capacity = hdh::actual_length(S, n);
    hdh::EccConfig ecc_cfg = to_ecc(ecc);
    hdh::BitString bits = payload_to_plane_bits(payload, payload_len, ecc_cfg, capacity);

    hdh::RawImage raw = hdh::load_image(cover_path);
    if (raw.height != S || raw.width != S) raw = hdh::resize_bilinear(raw, S);
    hdh::TensorF cover = hdh::normalize(raw);
    hdh::TensorF stego = hdh::Trainer::embed(ckpt.net, cover, bits, n, ckpt.bit_symbols);
    hdh::RawImage stego_raw = hdh::denormalize(stego);
    hdh::save_png(stego_png_out, stego_raw);

    if (verify) {
      // Extract from the stored 8-bit image, exactly as the receiver would.
      hdh::TensorF stored = hdh::normalize(stego_raw);
      hdh::BitString got = hdh::Trainer::extract(ckpt.net, stored, n, ckpt.trigger_value);
      std::vector<uint8_t> recovered;
      try {
        recovered = plane_bits_to_payload(got, ecc_cfg);
      } catch (const hdh::Error&) {
        hdh::fail(hdh::ErrorCode::Verify, "verification failed: payload not recoverable (BER " +
                                              std::to_string(hdh::ber(bits, got)) + ")");
      }
      if (recovered.size() != payload_len ||
          (payload_len && std::memcmp(recovered.data(), payload, payload_len) != 0))
        hdh::fail(hdh::ErrorCode::Verify, "verification failed: extracted payload differs (BER " +
                                              std::to_string(hdh::ber(bits, got)) + ")");
    }
  });
}

hdh_status hdh_extract(hdh_model* model, const char* stego_path, int block_size,
                       const hdh_ecc* ecc, const char* trigger_image, int raw, uint8_t* out,
                       size_t out_cap, size_t* out_len) {
  if (!model || !stego_path || !out || !out_len)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint& ckpt = model->ckpt;
    const int S = ckpt.net.spec.image_size;
    const int n = block_size > 0 ? block_size : ckpt.block_size;
    hdh::TensorF stego = load_exact(stego_path, S, "stego image");
    hdh::BitString bits;
    if (trigger_image) {
      hdh::TensorF trig = load_exact(trigger_image, S, "trigger image");
      hdh::TensorF plane = ckpt.net.forward(stego, trig, hdh::Mode::Eval, 0, nullptr);
      bits = hdh::decode_plane(plane, n);
    } else {
      bits = hdh::Trainer::extract(ckpt.net, stego, n, ckpt.trigger_value);
    }
    std::vector<uint8_t> bytes;
    if (raw) {
      bytes = hdh::bits_to_bytes(bits);
    } else {
      bytes = plane_bits_to_payload(bits, to_ecc(ecc));
    }
    if (bytes.size() > out_cap)
      hdh::fail(hdh::ErrorCode::Invalid,
                "output buffer too small: need " + std::to_string(bytes.size()) + " bytes");
    std::memcpy(out, bytes.data(), bytes.size());
    *out_len = bytes.size();
  });
}

hdh_status hdh_style(hdh_model* model, const char* input_path, const char* out_png) {
  if (!model || !input_path || !out_png)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint& ckpt = model->ckpt;
    const int S = ckpt.net.spec.image_size;
    hdh::RawImage raw = hdh::load_image(input_path);
    if (raw.height != S || raw.width != S) raw = hdh::resize_bilinear(raw, S);
    hdh::TensorF x = hdh::normalize(raw);
    hdh::TensorF y = hdh::style_image(S, ckpt.style);
    hdh::TensorF z = ckpt.net.forward(x, y, hdh::Mode::Eval, 0, nullptr);
    hdh::save_png(out_png, hdh::denormalize(z));
  });
}

hdh_status hdh_ingest(const char* directory, int image_size, double r_train, double r_val,
                      double r_test, uint64_t seed, const char* manifest_out) {
  if (!directory || !manifest_out) return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::DatasetSplit split =
        hdh::ingest_dataset(directory, image_size, r_train, r_val, r_test, seed);
    hdh::save_manifest(split, manifest_out);
  });
}

hdh_status hdh_synth_dataset(const char* directory, int count, int image_size, uint64_t seed) {
  if (!directory) return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] { hdh::synthesize_dataset(directory, count, image_size, seed); });
}

hdh_status hdh_train(const char* config_path, int resume) {
  if (!config_path) return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::RunConfig rc = hdh::parse_run_config(config_path);
    if (rc.train.output_dir.empty())
      hdh::fail(hdh::ErrorCode::Config, "config needs output_dir");
    hdh::DatasetSplit split = rc.resolve_split();
    fs::create_directories(rc.train.output_dir);
    hdh::save_manifest(split, (fs::path(rc.train.output_dir) / "dataset.manifest").string());
    hdh::Trainer trainer(rc.train, split);
    if (resume) trainer.resume();
    trainer.train();
  });
}

hdh_status hdh_sweep(const char* checkpoint_dir, const char* manifest, const int* block_sizes,
                     size_t n_sizes, uint64_t seed, int max_images, const char* out_csv) {
  if (!checkpoint_dir || !manifest || !block_sizes || !n_sizes || !out_csv)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint ckpt = hdh::load_checkpoint(checkpoint_dir);
    hdh::DatasetSplit split = hdh::load_manifest(manifest);
    std::vector<int> sizes(block_sizes, block_sizes + n_sizes);
    hdh::EvalReport report =
        hdh::payload_distortion_sweep(ckpt, split, sizes, seed, max_images);
    hdh::write_report_csv(report, out_csv);
  });
}

hdh_status hdh_trigger_test(const char* checkpoint_dir, const char* manifest, int trials,
                            uint64_t seed, double* mean_ber) {
  if (!checkpoint_dir || !manifest || !mean_ber)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint ckpt = hdh::load_checkpoint(checkpoint_dir);
    hdh::DatasetSplit split = hdh::load_manifest(manifest);
    *mean_ber = hdh::random_trigger_test(ckpt, split, trials, seed);
  });
}

hdh_status hdh_style_gap(const char* checkpoint_dir, const char* manifest, uint64_t seed,
                         int max_images, double* psnr_cover, double* psnr_stego) {
  if (!checkpoint_dir || !manifest || !psnr_cover || !psnr_stego)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint ckpt = hdh::load_checkpoint(checkpoint_dir);
    hdh::DatasetSplit split = hdh::load_manifest(manifest);
    hdh::StyleSource style;
    style.mode = hdh::StyleMode::Builtin;
    style.params = ckpt.style;
    auto res = hdh::style_on_stego_eval(ckpt, split, style, seed, max_images);
    *psnr_cover = res.psnr_cover_mean;
    *psnr_stego = res.psnr_stego_mean;
  });
}

hdh_status hdh_noise_eval(const char* ckpt_plain, const char* ckpt_noise_trained,
                          const char* manifest, const double* sigmas, size_t n_sigmas,
                          uint64_t seed, int max_images, const char* out_csv) {
  if (!ckpt_plain || !ckpt_noise_trained || !manifest || !sigmas || !n_sigmas || !out_csv)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint plain = hdh::load_checkpoint(ckpt_plain);
    hdh::Checkpoint noisy = hdh::load_checkpoint(ckpt_noise_trained);
    hdh::DatasetSplit split = hdh::load_manifest(manifest);
    std::vector<double> sg(sigmas, sigmas + n_sigmas);
    auto points = hdh::noise_robustness_eval(plain, noisy, sg, split, seed, max_images);
    std::ofstream f(out_csv);
    if (!f) hdh::fail(hdh::ErrorCode::Io, std::string("cannot write ") + out_csv);
    f << "sigma,ber_plain,ber_noise_trained\n";
    for (const auto& p : points)
      f << p.sigma << "," << p.ber_plain << "," << p.ber_noise_trained << "\n";
  });
}

hdh_status hdh_detect(const char* checkpoint_dir, const char* manifest, const int* block_sizes,
                      size_t n_sizes, int epochs, uint64_t seed, int max_pairs,
                      int shuffle_labels, const char* out_csv, double* last_accuracy) {
  if (!checkpoint_dir || !manifest || !block_sizes || !n_sizes || !out_csv)
    return set_error(hdh::ErrorCode::Invalid, "null argument");
  return guarded([&] {
    hdh::Checkpoint ckpt = hdh::load_checkpoint(checkpoint_dir);
    hdh::DatasetSplit split = hdh::load_manifest(manifest);
    const int S = ckpt.net.spec.image_size;

    std::vector<std::string> ids = split.test;
    if (max_pairs > 0 && int(ids.size()) > max_pairs) ids.resize(max_pairs);
    if (ids.size() < 10)
      hdh::fail(hdh::ErrorCode::Config, "need at least 10 test images for detection");

    std::ofstream f(out_csv);
    if (!f) hdh::fail(hdh::ErrorCode::Io, std::string("cannot write ") + out_csv);
    f << "AL,block_size,accuracy\n";
    double acc = 0;
    for (size_t k = 0; k < n_sizes; ++k) {
      const int n = block_sizes[k];
      const int al = hdh::actual_length(S, n);
      std::vector<hdh::TensorF> covers, stegos;
      for (size_t i = 0; i < ids.size(); ++i) {
        hdh::TensorF c = hdh::load_split_image(split, ids[i]);
        hdh::BitString bits =
            hdh::random_bits(al, hdh::hash_combine(seed, hdh::hash_combine(n, i)));
        hdh::TensorF s = hdh::Trainer::embed(ckpt.net, c, bits, n, ckpt.bit_symbols);
        // The steganalyzer sees what is exchanged: 8-bit images.
        covers.push_back(hdh::normalize(hdh::denormalize(c)));
        stegos.push_back(hdh::normalize(hdh::denormalize(s)));
      }
      hdh::DetectorConfig cfg;
      cfg.image_size = S;
      cfg.epochs = epochs > 0 ? epochs : cfg.epochs;
      cfg.seed = hdh::hash_combine(seed, n);
      cfg.shuffle_labels = shuffle_labels != 0;
      hdh::DetectorSplit dsplit;
      hdh::Detector det = hdh::train_detector(covers, stegos, cfg, &dsplit);
      acc = hdh::detector_accuracy(det, covers, stegos, dsplit.test);
      f << al << "," << n << "," << acc << "\n";
    }
    if (last_accuracy) *last_accuracy = acc;
  });
}

}  // extern "C"

// hdh command line tool. Talks to the core exclusively through the C API in
// hdh.h, so it doubles as a smoke test of the shared library surface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdh.h"

namespace {

int report(hdh_status st) {
  if (st == HDH_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", hdh_status_name(st), hdh_last_error());
  return int(st);
}

std::vector<uint8_t> parse_hex(const std::string& s) {
  if (s.size() % 2 != 0) throw CLI::ValidationError("hex payload needs an even digit count");
  std::vector<uint8_t> out;
  out.reserve(s.size() / 2);
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw CLI::ValidationError(std::string("bad hex digit '") + c + "'");
  };
  for (size_t i = 0; i < s.size(); i += 2) out.push_back(uint8_t(nib(s[i]) * 16 + nib(s[i + 1])));
  return out;
}

std::string to_hex(const uint8_t* p, size_t n) {
  static const char* d = "0123456789abcdef";
  std::string s;
  s.reserve(n * 2);
  for (size_t i = 0; i < n; ++i) {
    s.push_back(d[p[i] >> 4]);
    s.push_back(d[p[i] & 15]);
  }
  return s;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw CLI::ValidationError("cannot read " + path);
  std::vector<uint8_t> buf;
  uint8_t chunk[4096];
  size_t n;
  while ((n = std::fread(chunk, 1, sizeof chunk, f)) > 0) buf.insert(buf.end(), chunk, chunk + n);
  std::fclose(f);
  return buf;
}

struct ModelHandle {
  hdh_model* m = nullptr;
  ~ModelHandle() { hdh_model_free(m); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hdh: joint style transfer and image steganography"};
  app.require_subcommand(1);

  // Shared embed/extract options.
  std::string ckpt, cover, stego, out_path, payload_hex, payload_file, trigger_path;
  int block_size = 0;
  hdh_ecc ecc{1, 255, 223};
  bool no_ecc = false, verify = false, raw = false;
  auto add_ecc_opts = [&](CLI::App* c) {
    c->add_flag("--no-ecc", no_ecc, "disable Reed-Solomon coding");
    c->add_option("--rs-n", ecc.rs_n, "RS codeword bytes")->check(CLI::Range(3, 255));
    c->add_option("--rs-k", ecc.rs_k, "RS message bytes")->check(CLI::Range(1, 253));
  };

  auto* c_embed = app.add_subcommand("embed", "hide a payload in a cover image");
  c_embed->add_option("--model", ckpt, "checkpoint directory")->required();
  c_embed->add_option("--cover", cover, "cover image (resized to model size)")->required();
  c_embed->add_option("--out", out_path, "stego PNG to write")->required();
  c_embed->add_option("--payload-hex", payload_hex, "payload as hex digits");
  c_embed->add_option("--payload-file", payload_file, "payload read from a file");
  c_embed->add_option("--block-size", block_size, "message block size N (0 = model default)");
  c_embed->add_flag("--verify", verify, "re-extract and fail on any bit mismatch");
  add_ecc_opts(c_embed);

  auto* c_extract = app.add_subcommand("extract", "recover a payload from a stego image");
  c_extract->add_option("--model", ckpt, "checkpoint directory")->required();
  c_extract->add_option("--stego", stego, "stego image at model size")->required();
  c_extract->add_option("--out", out_path, "write payload bytes here (default: hex to stdout)");
  c_extract->add_option("--block-size", block_size, "message block size N (0 = model default)");
  c_extract->add_option("--trigger-image", trigger_path,
                        "use this image instead of the built-in trigger");
  c_extract->add_flag("--raw", raw, "dump packed plane bits, skip framing and ECC");
  add_ecc_opts(c_extract);

  std::string input_path;
  auto* c_style = app.add_subcommand("style", "apply the model's style transfer");
  c_style->add_option("--model", ckpt, "checkpoint directory")->required();
  c_style->add_option("--input", input_path, "content image")->required();
  c_style->add_option("--out", out_path, "stylized PNG to write")->required();

  auto* c_info = app.add_subcommand("info", "print checkpoint facts");
  c_info->add_option("--model", ckpt, "checkpoint directory")->required();

  std::string config_path;
  bool resume = false;
  auto* c_train = app.add_subcommand("train", "train a model from a run config");
  c_train->add_option("config", config_path, "key=value run configuration file")->required();
  c_train->add_flag("--resume", resume, "continue from <output_dir>/last");

  std::string manifest, out_csv;
  std::vector<int> block_sizes;
  uint64_t seed = 1;
  int max_images = 0;
  auto* c_sweep = app.add_subcommand("sweep", "payload size vs distortion over the test split");
  c_sweep->add_option("--model", ckpt)->required();
  c_sweep->add_option("--manifest", manifest, "dataset manifest")->required();
  c_sweep->add_option("--block-sizes", block_sizes, "block sizes to sweep")
      ->required()
      ->delimiter(',');
  c_sweep->add_option("--seed", seed);
  c_sweep->add_option("--max-images", max_images, "limit test images (0 = all)");
  c_sweep->add_option("--out", out_csv, "CSV output path")->required();

  int trials = 100;
  auto* c_trig = app.add_subcommand("trigger-test", "extraction error rate with wrong triggers");
  c_trig->add_option("--model", ckpt)->required();
  c_trig->add_option("--manifest", manifest)->required();
  c_trig->add_option("--trials", trials)->check(CLI::PositiveNumber);
  c_trig->add_option("--seed", seed);

  auto* c_gap = app.add_subcommand("style-gap", "style quality on covers vs their stegos");
  c_gap->add_option("--model", ckpt)->required();
  c_gap->add_option("--manifest", manifest)->required();
  c_gap->add_option("--seed", seed);
  c_gap->add_option("--max-images", max_images);

  std::string ckpt_noise;
  std::vector<double> sigmas{0.05, 0.1, 0.15};
  auto* c_noise = app.add_subcommand("noise-eval", "extraction under additive stego noise");
  c_noise->add_option("--model", ckpt, "plain checkpoint")->required();
  c_noise->add_option("--model-noise", ckpt_noise, "noise-trained checkpoint")->required();
  c_noise->add_option("--manifest", manifest)->required();
  c_noise->add_option("--sigmas", sigmas)->delimiter(',');
  c_noise->add_option("--seed", seed);
  c_noise->add_option("--max-images", max_images);
  c_noise->add_option("--out", out_csv, "CSV output path")->required();

  int det_epochs = 15, max_pairs = 0;
  bool shuffle_labels = false;
  auto* c_detect = app.add_subcommand("detect", "train the steganalysis detector");
  c_detect->add_option("--model", ckpt)->required();
  c_detect->add_option("--manifest", manifest)->required();
  c_detect->add_option("--block-sizes", block_sizes)->required()->delimiter(',');
  c_detect->add_option("--epochs", det_epochs)->check(CLI::PositiveNumber);
  c_detect->add_option("--seed", seed);
  c_detect->add_option("--max-pairs", max_pairs, "limit cover/stego pairs (0 = all)");
  c_detect->add_flag("--shuffle-labels", shuffle_labels, "random-label control run");
  c_detect->add_option("--out", out_csv, "CSV output path")->required();

  std::string directory;
  int image_size = 128;
  double r_train = 0.8, r_val = 0.1, r_test = 0.1;
  auto* c_ingest = app.add_subcommand("ingest", "scan an image directory into a manifest");
  c_ingest->add_option("--dir", directory)->required();
  c_ingest->add_option("--image-size", image_size);
  c_ingest->add_option("--ratio-train", r_train);
  c_ingest->add_option("--ratio-val", r_val);
  c_ingest->add_option("--ratio-test", r_test);
  c_ingest->add_option("--seed", seed);
  c_ingest->add_option("--out", out_path, "manifest file to write")->required();

  int count = 300;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic image corpus");
  c_synth->add_option("--dir", directory)->required();
  c_synth->add_option("--count", count)->check(CLI::PositiveNumber);
  c_synth->add_option("--image-size", image_size);
  c_synth->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  if (no_ecc) ecc.scheme = 0;

  if (*c_train) return report(hdh_train(config_path.c_str(), resume ? 1 : 0));

  if (*c_ingest)
    return report(hdh_ingest(directory.c_str(), image_size, r_train, r_val, r_test, seed,
                             out_path.c_str()));
  if (*c_synth) return report(hdh_synth_dataset(directory.c_str(), count, image_size, seed));

  if (*c_embed) {
    if (payload_hex.empty() == payload_file.empty()) {
      std::fprintf(stderr, "embed needs exactly one of --payload-hex / --payload-file\n");
      return int(HDH_ERR_INVALID);
    }
    std::vector<uint8_t> payload =
        payload_file.empty() ? parse_hex(payload_hex) : read_file(payload_file);
    ModelHandle h;
    if (auto st = hdh_model_load(ckpt.c_str(), &h.m)) return report(st);
    return report(hdh_embed(h.m, cover.c_str(), payload.data(), payload.size(), block_size, &ecc,
                            verify ? 1 : 0, out_path.c_str()));
  }

  if (*c_extract) {
    ModelHandle h;
    if (auto st = hdh_model_load(ckpt.c_str(), &h.m)) return report(st);
    int s = hdh_model_image_size(h.m);
    std::vector<uint8_t> out(size_t(s) * s / 8 + 16);
    size_t got = 0;
    if (auto st = hdh_extract(h.m, stego.c_str(), block_size, &ecc,
                              trigger_path.empty() ? nullptr : trigger_path.c_str(), raw ? 1 : 0,
                              out.data(), out.size(), &got))
      return report(st);
    if (out_path.empty()) {
      std::printf("%s\n", to_hex(out.data(), got).c_str());
    } else {
      std::FILE* f = std::fopen(out_path.c_str(), "wb");
      if (!f || std::fwrite(out.data(), 1, got, f) != got) {
        std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
        if (f) std::fclose(f);
        return int(HDH_ERR_IO);
      }
      std::fclose(f);
    }
    return 0;
  }

  if (*c_style) {
    ModelHandle h;
    if (auto st = hdh_model_load(ckpt.c_str(), &h.m)) return report(st);
    return report(hdh_style(h.m, input_path.c_str(), out_path.c_str()));
  }

  if (*c_info) {
    ModelHandle h;
    if (auto st = hdh_model_load(ckpt.c_str(), &h.m)) return report(st);
    char fp[32] = {0};
    if (auto st = hdh_model_fingerprint(h.m, fp, sizeof fp)) return report(st);
    int n = hdh_model_block_size(h.m);
    std::printf("image_size: %d\nblock_size: %d\ncapacity_bits: %d\nfingerprint: %s\n",
                hdh_model_image_size(h.m), n, hdh_model_capacity_bits(h.m, n), fp);
    return 0;
  }

  if (*c_sweep)
    return report(hdh_sweep(ckpt.c_str(), manifest.c_str(), block_sizes.data(),
                            block_sizes.size(), seed, max_images, out_csv.c_str()));

  if (*c_trig) {
    double ber = 0;
    if (auto st = hdh_trigger_test(ckpt.c_str(), manifest.c_str(), trials, seed, &ber))
      return report(st);
    std::printf("mean_ber: %.6f over %d trials\n", ber, trials);
    return 0;
  }

  if (*c_gap) {
    double pc = 0, ps = 0;
    if (auto st = hdh_style_gap(ckpt.c_str(), manifest.c_str(), seed, max_images, &pc, &ps))
      return report(st);
    std::printf("psnr_cover: %.3f\npsnr_stego: %.3f\ngap: %.3f\n", pc, ps, pc - ps);
    return 0;
  }

  if (*c_noise)
    return report(hdh_noise_eval(ckpt.c_str(), ckpt_noise.c_str(), manifest.c_str(),
                                 sigmas.data(), sigmas.size(), seed, max_images, out_csv.c_str()));

  if (*c_detect) {
    double acc = 0;
    if (auto st = hdh_detect(ckpt.c_str(), manifest.c_str(), block_sizes.data(),
                             block_sizes.size(), det_epochs, seed, max_pairs,
                             shuffle_labels ? 1 : 0, out_csv.c_str(), &acc))
      return report(st);
    std::printf("final_accuracy: %.4f (see %s)\n", acc, out_csv.c_str());
    return 0;
  }

  return 0;
}

#include "hdh.h"

#include <cstring>
#include <filesystem>
#include <fstream>

#include "checkpoint.hpp"
#include "doctest.h"
#include "image.hpp"
#include "unet.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

// Small untrained checkpoint; enough to exercise the API plumbing.
std::string make_checkpoint(const TempDir& dir) {
  hdh::Checkpoint ckpt;
  hdh::NetworkSpec spec;
  spec.image_size = 16;
  spec.down_channels = {8, 8, 8, 8};
  ckpt.net = hdh::UNet<float>::build(spec, 5);
  ckpt.block_size = 4;
  std::string d = (dir.path / "ckpt").string();
  hdh::save_checkpoint(ckpt, d);
  return d;
}

std::string make_cover(const TempDir& dir, int s) {
  hdh::RawImage img(s, s);
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = uint8_t((x * 11 + y * 7 + c * 31) % 256);
  std::string p = (dir.path / "cover.png").string();
  hdh::save_png(p, img);
  return p;
}

}  // namespace

TEST_CASE("status names are stable") {
  CHECK(std::strcmp(hdh_status_name(HDH_OK), "ok") == 0);
  CHECK(hdh_status_name(HDH_ERR_CAPACITY) != nullptr);
  CHECK(hdh_status_name(HDH_ERR_CHECKPOINT) != nullptr);
}

TEST_CASE("loading a missing checkpoint fails with a message") {
  hdh_model* m = nullptr;
  hdh_status st = hdh_model_load("/nonexistent/ckpt", &m);
  CHECK(st != HDH_OK);
  CHECK(m == nullptr);
  CHECK(std::strlen(hdh_last_error()) > 0);
}

TEST_CASE("model introspection") {
  TempDir dir("hdh_capi_info");
  std::string ck = make_checkpoint(dir);
  hdh_model* m = nullptr;
  REQUIRE(hdh_model_load(ck.c_str(), &m) == HDH_OK);
  CHECK(hdh_model_image_size(m) == 16);
  CHECK(hdh_model_block_size(m) == 4);
  CHECK(hdh_model_capacity_bits(m, 0) == 16);   // trained block size 4
  CHECK(hdh_model_capacity_bits(m, 8) == 4);
  CHECK(hdh_model_capacity_bits(m, 3) == -1);   // 3 does not divide 16
  char fp[32] = {0};
  CHECK(hdh_model_fingerprint(m, fp, sizeof fp) == HDH_OK);
  CHECK(std::strlen(fp) == 16);
  hdh_model_free(m);
}

TEST_CASE("embedding respects capacity") {
  TempDir dir("hdh_capi_cap");
  std::string ck = make_checkpoint(dir);
  std::string cover = make_cover(dir, 16);
  hdh_model* m = nullptr;
  REQUIRE(hdh_model_load(ck.c_str(), &m) == HDH_OK);

  // 16 bits of capacity cannot hold the 4-byte header plus a payload.
  uint8_t payload[8] = {1, 2, 3, 4, 5, 6, 7, 8};
  hdh_ecc none{0, 0, 0};
  std::string out = (dir.path / "stego.png").string();
  hdh_status st = hdh_embed(m, cover.c_str(), payload, sizeof payload, 0, &none, 0, out.c_str());
  CHECK(st == HDH_ERR_CAPACITY);
  CHECK(std::strlen(hdh_last_error()) > 0);
  hdh_model_free(m);
}

TEST_CASE("raw embed/extract round-trips through files for an untrained net") {
  // Raw mode skips framing, so the only requirement on the network is
  // determinism: whatever bits come out must come out again.
  TempDir dir("hdh_capi_raw");
  std::string ck = make_checkpoint(dir);
  std::string cover = make_cover(dir, 16);
  hdh_model* m = nullptr;
  REQUIRE(hdh_model_load(ck.c_str(), &m) == HDH_OK);

  uint8_t payload[2] = {0xA5, 0x3C};
  hdh_ecc none{0, 0, 0};
  std::string out = (dir.path / "stego.png").string();
  // block size 1: 256 bits of capacity, plenty for header plus payload
  REQUIRE(hdh_embed(m, cover.c_str(), payload, 2, 1, &none, 0, out.c_str()) == HDH_OK);

  uint8_t got1[40], got2[40];
  size_t n1 = 0, n2 = 0;
  REQUIRE(hdh_extract(m, out.c_str(), 1, &none, nullptr, 1, got1, sizeof got1, &n1) == HDH_OK);
  REQUIRE(hdh_extract(m, out.c_str(), 1, &none, nullptr, 1, got2, sizeof got2, &n2) == HDH_OK);
  CHECK(n1 == 32);  // 256 bits packed
  CHECK(n1 == n2);
  CHECK(std::memcmp(got1, got2, n1) == 0);
  hdh_model_free(m);
}

TEST_CASE("extraction rejects a wrong-size stego") {
  TempDir dir("hdh_capi_shape");
  std::string ck = make_checkpoint(dir);
  std::string big = make_cover(dir, 32);
  hdh_model* m = nullptr;
  REQUIRE(hdh_model_load(ck.c_str(), &m) == HDH_OK);
  uint8_t out[16];
  size_t n = 0;
  hdh_ecc none{0, 0, 0};
  CHECK(hdh_extract(m, big.c_str(), 0, &none, nullptr, 1, out, sizeof out, &n) ==
        HDH_ERR_SHAPE);
  hdh_model_free(m);
}

TEST_CASE("style transfer writes an output image") {
  TempDir dir("hdh_capi_style");
  std::string ck = make_checkpoint(dir);
  std::string cover = make_cover(dir, 16);
  hdh_model* m = nullptr;
  REQUIRE(hdh_model_load(ck.c_str(), &m) == HDH_OK);
  std::string out = (dir.path / "styled.png").string();
  CHECK(hdh_style(m, cover.c_str(), out.c_str()) == HDH_OK);
  hdh::RawImage img = hdh::load_image(out);
  CHECK(img.height == 16);
  hdh_model_free(m);
}

TEST_CASE("synthesis and ingestion work through the C layer") {
  TempDir dir("hdh_capi_ds");
  std::string imgs = (dir.path / "imgs").string();
  REQUIRE(hdh_synth_dataset(imgs.c_str(), 12, 16, 3) == HDH_OK);
  std::string manifest = (dir.path / "split.manifest").string();
  REQUIRE(hdh_ingest(imgs.c_str(), 16, 0.8, 0.1, 0.1, 7, manifest.c_str()) == HDH_OK);
  CHECK(fs::exists(manifest));
}

TEST_CASE("training through the C layer fails cleanly on a bad config") {
  CHECK(hdh_train("/nonexistent/run.conf", 0) == HDH_ERR_IO);
}

#include "checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hdh {
namespace {

constexpr uint32_t kBlobMagic = 0x48444857;  // "HDHW"
constexpr uint32_t kBlobVersion = 1;

template <typename Writer>
void walk_arrays(UNet<float>& net, Writer&& fn) {
  const int d = net.spec.stages();
  for (int i = 0; i < d; ++i) {
    fn(net.down[i].w.data(), size_t(net.down[i].w.size()));
    fn(net.down[i].b.data(), size_t(net.down[i].b.size()));
    if (i > 0) {
      fn(net.down_bn[i].gamma.data(), size_t(net.down_bn[i].gamma.size()));
      fn(net.down_bn[i].beta.data(), size_t(net.down_bn[i].beta.size()));
      fn(net.down_bn[i].run_mean.data(), size_t(net.down_bn[i].run_mean.size()));
      fn(net.down_bn[i].run_var.data(), size_t(net.down_bn[i].run_var.size()));
    }
  }
  for (int j = 0; j < d; ++j) {
    fn(net.up[j].w.data(), size_t(net.up[j].w.size()));
    fn(net.up[j].b.data(), size_t(net.up[j].b.size()));
    if (j < d - 1) {
      fn(net.up_bn[j].gamma.data(), size_t(net.up_bn[j].gamma.size()));
      fn(net.up_bn[j].beta.data(), size_t(net.up_bn[j].beta.size()));
      fn(net.up_bn[j].run_mean.data(), size_t(net.up_bn[j].run_mean.size()));
      fn(net.up_bn[j].run_var.data(), size_t(net.up_bn[j].run_var.size()));
    }
  }
}

}  // namespace

void write_weight_blob(const UNet<float>& net, const std::string& path,
                       const std::string& fingerprint) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot write weights: " + path);
  f.write(reinterpret_cast<const char*>(&kBlobMagic), 4);
  f.write(reinterpret_cast<const char*>(&kBlobVersion), 4);
  uint64_t fp = std::stoull(fingerprint, nullptr, 16);
  f.write(reinterpret_cast<const char*>(&fp), 8);
  walk_arrays(const_cast<UNet<float>&>(net), [&](float* p, size_t n) {
    uint64_t n64 = n;
    f.write(reinterpret_cast<const char*>(&n64), 8);
    f.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(float)));
  });
  if (!f) fail(ErrorCode::Io, "write failure on " + path);
}

void read_weight_blob(UNet<float>& net, const std::string& path,
                      const std::string& fingerprint) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read weights: " + path);
  uint32_t magic = 0, version = 0;
  uint64_t fp = 0;
  f.read(reinterpret_cast<char*>(&magic), 4);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&fp), 8);
  if (magic != kBlobMagic || version != kBlobVersion)
    fail(ErrorCode::Checkpoint, "not a weight blob: " + path);
  if (fp != std::stoull(fingerprint, nullptr, 16))
    fail(ErrorCode::Checkpoint,
         "incompatible checkpoint: architecture fingerprint mismatch in " + path);
  walk_arrays(net, [&](float* p, size_t n) {
    uint64_t n64 = 0;
    f.read(reinterpret_cast<char*>(&n64), 8);
    if (n64 != n) fail(ErrorCode::Checkpoint, "weight blob shape mismatch in " + path);
    f.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(float)));
  });
  if (!f) fail(ErrorCode::Checkpoint, "truncated weight blob: " + path);
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
  fs::create_directories(dir);
  const NetworkSpec& spec = ckpt.net.spec;
  json j;
  j["format"] = "hdh-checkpoint-v1";
  j["fingerprint"] = spec.fingerprint();
  j["spec"] = {{"image_size", spec.image_size},
               {"down_channels", spec.down_channels},
               {"up_channels", spec.resolved_up_channels()},
               {"kernel", spec.kernel},
               {"stride", spec.stride},
               {"dropout_stages", spec.dropout_stages},
               {"dropout_rate", spec.dropout_rate},
               {"leaky_slope", spec.leaky_slope}};
  j["style"] = {{"matrix", ckpt.style.matrix}, {"gamma", ckpt.style.gamma}};
  j["codec"] = {{"bit_symbols", ckpt.bit_symbols == BitSymbols::PlusMinusOne ? "pm1" : "01"},
                {"trigger_value", ckpt.trigger_value},
                {"block_size", ckpt.block_size}};
  j["train_step"] = ckpt.train_step;
  std::ofstream mf(fs::path(dir) / "manifest.json");
  if (!mf) fail(ErrorCode::Io, "cannot write manifest in " + dir);
  mf << j.dump(2) << "\n";
  write_weight_blob(ckpt.net, (fs::path(dir) / "weights.bin").string(), spec.fingerprint());
}

Checkpoint load_checkpoint(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) fail(ErrorCode::Io, "cannot read checkpoint manifest in " + dir);
  json j;
  try {
    mf >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::Checkpoint, std::string("malformed manifest: ") + e.what());
  }
  if (j.value("format", "") != "hdh-checkpoint-v1")
    fail(ErrorCode::Checkpoint, "unknown checkpoint format in " + dir);

  NetworkSpec spec;
  const auto& js = j.at("spec");
  spec.image_size = js.at("image_size").get<int>();
  spec.down_channels = js.at("down_channels").get<std::vector<int>>();
  spec.up_channels = js.at("up_channels").get<std::vector<int>>();
  spec.kernel = js.at("kernel").get<int>();
  spec.stride = js.at("stride").get<int>();
  spec.dropout_stages = js.at("dropout_stages").get<std::vector<int>>();
  spec.dropout_rate = js.at("dropout_rate").get<double>();
  spec.leaky_slope = js.at("leaky_slope").get<double>();
  spec.validate();

  std::string fp = j.at("fingerprint").get<std::string>();
  if (fp != spec.fingerprint())
    fail(ErrorCode::Checkpoint, "manifest fingerprint does not match its own spec");

  Checkpoint ckpt;
  ckpt.net = UNet<float>::build(spec, 0);
  read_weight_blob(ckpt.net, (fs::path(dir) / "weights.bin").string(), fp);

  const auto& jst = j.at("style");
  auto m = jst.at("matrix").get<std::vector<double>>();
  auto g = jst.at("gamma").get<std::vector<double>>();
  if (m.size() != 9 || g.size() != 3) fail(ErrorCode::Checkpoint, "malformed style block");
  std::copy(m.begin(), m.end(), ckpt.style.matrix.begin());
  std::copy(g.begin(), g.end(), ckpt.style.gamma.begin());

  const auto& jc = j.at("codec");
  ckpt.bit_symbols = jc.at("bit_symbols").get<std::string>() == "pm1" ? BitSymbols::PlusMinusOne
                                                                      : BitSymbols::ZeroOne;
  ckpt.trigger_value = jc.at("trigger_value").get<float>();
  ckpt.block_size = jc.at("block_size").get<int>();
  ckpt.train_step = j.value("train_step", uint64_t(0));
  return ckpt;
}

}  // namespace hdh

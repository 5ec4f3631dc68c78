#include "config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace hdh {
namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
  std::vector<int> out;
  for (const auto& tok : split_csv(s)) {
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      fail(ErrorCode::Config, "bad integer '" + tok + "' in key " + key);
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& tok : split_csv(s)) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      fail(ErrorCode::Config, "bad number '" + tok + "' in key " + key);
    }
  }
  return out;
}

}  // namespace

std::vector<int> default_down_channels(int image_size) {
  std::vector<int> ch;
  int width = 64;
  for (int s = image_size; s > 1; s /= 2) {
    ch.push_back(width);
    width = std::min(512, width * 2);
  }
  return ch;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot read config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    // trim
    auto notspace = [](unsigned char ch) { return !std::isspace(ch); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Config, "line " + std::to_string(lineno) + " is not key=value: " + line);
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
    if (kv.count(key)) fail(ErrorCode::Config, "duplicate key: " + key);
    kv[key] = val;
  }

  RunConfig rc;
  int image_size = 128;
  bool down_set = false;

  auto take = [&](const std::string& key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_double = [&](const std::string& key, double dflt) {
    std::string v = take(key);
    if (v.empty()) return dflt;
    try {
      return std::stod(v);
    } catch (...) {
      fail(ErrorCode::Config, "bad number for key " + key + ": " + v);
    }
  };
  auto take_int = [&](const std::string& key, long long dflt) {
    std::string v = take(key);
    if (v.empty()) return dflt;
    try {
      return std::stoll(v);
    } catch (...) {
      fail(ErrorCode::Config, "bad integer for key " + key + ": " + v);
    }
  };

  image_size = int(take_int("image_size", 128));
  if (image_size < 128 || (image_size & (image_size - 1)) != 0)
    fail(ErrorCode::Config, "image_size must be a power of two >= 128");

  TrainConfig& t = rc.train;
  t.spec.image_size = image_size;
  t.learning_rate = take_double("learning_rate", 1e-4);
  t.adam_beta1 = take_double("adam_beta1", 0.9);
  t.adam_beta2 = take_double("adam_beta2", 0.999);
  t.batch_size = int(take_int("batch_size", 1));
  t.epochs = int(take_int("epochs", 10));
  t.block_size = int(take_int("block_size", 8));
  t.seed = uint64_t(take_int("seed", 1));
  t.checkpoint_interval = uint64_t(take_int("checkpoint_interval", 0));

  std::string norm = take("loss_norm");
  if (!norm.empty()) {
    if (norm == "l1")
      t.loss.norm = NormKind::L1;
    else if (norm == "l2")
      t.loss.norm = NormKind::L2;
    else
      fail(ErrorCode::Config, "loss_norm must be l1 or l2, got " + norm);
  }
  t.loss.alpha1 = take_double("alpha1", 1.0);
  t.loss.alpha2 = take_double("alpha2", 1.0);

  std::string sig = take("noise_sigmas");
  if (!sig.empty() && sig != "none") t.noise_sigmas = parse_double_list(sig, "noise_sigmas");

  std::string down = take("down_channels");
  if (!down.empty()) {
    t.spec.down_channels = parse_int_list(down, "down_channels");
    down_set = true;
  }
  std::string up = take("up_channels");
  if (!up.empty()) t.spec.up_channels = parse_int_list(up, "up_channels");
  if (!down_set) t.spec.down_channels = default_down_channels(image_size);
  t.spec.dropout_rate = take_double("dropout_rate", 0.5);

  std::string sym = take("bit_symbols");
  if (!sym.empty()) {
    if (sym == "pm1")
      t.bit_symbols = BitSymbols::PlusMinusOne;
    else if (sym == "01")
      t.bit_symbols = BitSymbols::ZeroOne;
    else
      fail(ErrorCode::Config, "bit_symbols must be pm1 or 01, got " + sym);
  }
  t.trigger_value = float(take_double("trigger_value", -1.0));

  std::string style_mode = take("style_mode");
  if (!style_mode.empty()) {
    if (style_mode == "builtin")
      t.style.mode = StyleMode::Builtin;
    else if (style_mode == "external")
      t.style.mode = StyleMode::ExternalDirectory;
    else
      fail(ErrorCode::Config, "style_mode must be builtin or external, got " + style_mode);
  }
  t.style.external_dir = take("style_dir");
  if (t.style.mode == StyleMode::ExternalDirectory && t.style.external_dir.empty())
    fail(ErrorCode::Config, "style_mode=external requires style_dir");
  std::string mat = take("style_matrix");
  if (!mat.empty()) {
    auto m = parse_double_list(mat, "style_matrix");
    if (m.size() != 9) fail(ErrorCode::Config, "style_matrix needs 9 values");
    std::copy(m.begin(), m.end(), t.style.params.matrix.begin());
  }
  std::string gam = take("style_gamma");
  if (!gam.empty()) {
    auto g = parse_double_list(gam, "style_gamma");
    if (g.size() != 3) fail(ErrorCode::Config, "style_gamma needs 3 values");
    std::copy(g.begin(), g.end(), t.style.params.gamma.begin());
  }

  t.output_dir = take("output_dir");
  rc.dataset_dir = take("dataset_dir");
  rc.manifest = take("manifest");
  rc.ratio_train = take_double("ratio_train", 0.8);
  rc.ratio_val = take_double("ratio_val", 0.1);
  rc.ratio_test = take_double("ratio_test", 0.1);
  rc.split_seed = uint64_t(take_int("split_seed", 7));

  if (!kv.empty()) fail(ErrorCode::Config, "unknown config key: " + kv.begin()->first);

  t.validate();
  t.style.params.validate();
  if (rc.dataset_dir.empty() && rc.manifest.empty())
    fail(ErrorCode::Config, "config needs dataset_dir or manifest");
  return rc;
}

DatasetSplit RunConfig::resolve_split() const {
  if (!manifest.empty()) {
    DatasetSplit s = load_manifest(manifest);
    if (s.image_size != train.spec.image_size)
      fail(ErrorCode::Config, "manifest image size does not match configured image_size");
    return s;
  }
  return ingest_dataset(dataset_dir, train.spec.image_size, ratio_train, ratio_val, ratio_test,
                        split_seed);
}

}  // namespace hdh

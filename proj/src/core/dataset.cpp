#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "errors.hpp"
#include "image.hpp"
#include "rng.hpp"

namespace fs = std::filesystem;

namespace hdh {

DatasetSplit ingest_dataset(const std::string& directory, int image_size, double r_train,
                            double r_val, double r_test, uint64_t seed) {
  if (!fs::is_directory(directory)) fail(ErrorCode::Io, "not a directory: " + directory);
  if (r_train <= 0 || r_val < 0 || r_test < 0 || std::abs(r_train + r_val + r_test - 1.0) > 1e-9)
    fail(ErrorCode::Config, "split ratios must be nonnegative and sum to 1");

  std::vector<std::string> ok, failures;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg") continue;
    cv::Mat img = cv::imread(entry.path().string(), cv::IMREAD_COLOR);
    if (img.empty())
      failures.push_back(entry.path().filename().string());
    else
      ok.push_back(entry.path().filename().string());
  }
  if (ok.size() < 10) {
    std::string msg = "need at least 10 decodable RGB images in " + directory + ", found " +
                      std::to_string(ok.size());
    if (!failures.empty()) {
      msg += "; undecodable:";
      for (const auto& f : failures) msg += " " + f;
    }
    fail(ErrorCode::Io, msg);
  }

  std::sort(ok.begin(), ok.end());
  Rng rng(hash_combine(seed, 0xda7a5e7ULL));
  for (size_t i = ok.size() - 1; i > 0; --i) std::swap(ok[i], ok[rng.below(i + 1)]);

  const size_t n = ok.size();
  size_t n_train = size_t(std::llround(r_train * double(n)));
  size_t n_val = size_t(std::llround(r_val * double(n)));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);

  DatasetSplit split;
  split.root = fs::absolute(directory).string();
  split.image_size = image_size;
  split.seed = seed;
  split.train.assign(ok.begin(), ok.begin() + n_train);
  split.validation.assign(ok.begin() + n_train, ok.begin() + n_train + n_val);
  split.test.assign(ok.begin() + n_train + n_val, ok.end());
  return split;
}

void save_manifest(const DatasetSplit& split, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write manifest: " + path);
  f << "root " << split.root << "\n";
  f << "size " << split.image_size << "\n";
  f << "seed " << split.seed << "\n";
  f << "[train]\n";
  for (const auto& id : split.train) f << id << "\n";
  f << "[validation]\n";
  for (const auto& id : split.validation) f << id << "\n";
  f << "[test]\n";
  for (const auto& id : split.test) f << id << "\n";
}

DatasetSplit load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot read manifest: " + path);
  DatasetSplit split;
  std::string line;
  std::vector<std::string>* section = nullptr;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.rfind("root ", 0) == 0)
      split.root = line.substr(5);
    else if (line.rfind("size ", 0) == 0)
      split.image_size = std::stoi(line.substr(5));
    else if (line.rfind("seed ", 0) == 0)
      split.seed = std::stoull(line.substr(5));
    else if (line == "[train]")
      section = &split.train;
    else if (line == "[validation]")
      section = &split.validation;
    else if (line == "[test]")
      section = &split.test;
    else if (section)
      section->push_back(line);
    else
      fail(ErrorCode::Io, "malformed manifest line: " + line);
  }
  return split;
}

TensorF load_split_image(const DatasetSplit& split, const std::string& id) {
  return load_normalized((fs::path(split.root) / id).string(), split.image_size);
}

void synthesize_dataset(const std::string& directory, int count, int image_size,
                        uint64_t seed) {
  fs::create_directories(directory);
  for (int i = 0; i < count; ++i) {
    Rng rng(hash_combine(seed, uint64_t(i) + 1));
    cv::Mat img(image_size, image_size, CV_8UC3);

    // Smooth base gradient.
    double ar = rng.uniform(0, 255), br = rng.uniform(-120, 120), cr = rng.uniform(-120, 120);
    double ag = rng.uniform(0, 255), bg = rng.uniform(-120, 120), cg = rng.uniform(-120, 120);
    double ab = rng.uniform(0, 255), bb = rng.uniform(-120, 120), cb = rng.uniform(-120, 120);
    for (int y = 0; y < image_size; ++y)
      for (int x = 0; x < image_size; ++x) {
        double u = double(x) / image_size, v = double(y) / image_size;
        auto clamp8 = [](double t) { return uchar(std::min(255.0, std::max(0.0, t))); };
        img.at<cv::Vec3b>(y, x) = cv::Vec3b(clamp8(ab + bb * u + cb * v),
                                            clamp8(ag + bg * u + cg * v),
                                            clamp8(ar + br * u + cr * v));
      }

    // Random filled shapes.
    int shapes = 3 + int(rng.below(6));
    for (int k = 0; k < shapes; ++k) {
      cv::Scalar color(rng.below(256), rng.below(256), rng.below(256));
      int cx = int(rng.below(image_size)), cy = int(rng.below(image_size));
      if (rng.coin()) {
        cv::circle(img, {cx, cy}, 4 + int(rng.below(image_size / 3)), color, cv::FILLED);
      } else {
        int w = 4 + int(rng.below(image_size / 2)), h = 4 + int(rng.below(image_size / 2));
        cv::rectangle(img, {cx - w / 2, cy - h / 2}, {cx + w / 2, cy + h / 2}, color,
                      cv::FILLED);
      }
    }

    // Band-limited texture: blurred noise blended in.
    cv::Mat noise(image_size, image_size, CV_8UC3);
    for (int y = 0; y < image_size; ++y)
      for (int x = 0; x < image_size; ++x)
        noise.at<cv::Vec3b>(y, x) =
            cv::Vec3b(uchar(rng.below(256)), uchar(rng.below(256)), uchar(rng.below(256)));
    cv::GaussianBlur(noise, noise, cv::Size(9, 9), 3.0);
    double w = rng.uniform(0.1, 0.35);
    cv::addWeighted(img, 1.0 - w, noise, w, 0.0, img);

    char name[64];
    std::snprintf(name, sizeof(name), "synth_%05d.png", i);
    if (!cv::imwrite((fs::path(directory) / name).string(), img))
      fail(ErrorCode::Io, std::string("cannot write ") + name);
  }
}

}  // namespace hdh

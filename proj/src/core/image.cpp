#include "image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "errors.hpp"

namespace hdh {

TensorF normalize(const RawImage& raw) {
  if (raw.pixels.size() != size_t(raw.height) * raw.width * 3)
    fail(ErrorCode::Invalid, "malformed image: expected 3-channel RGB buffer");
  TensorF t(raw.height, raw.width, 3);
  for (size_t i = 0; i < raw.pixels.size(); ++i)
    t.v[i] = float(raw.pixels[i]) / 127.5f - 1.0f;
  return t;
}

RawImage denormalize(const TensorF& t) {
  if (t.c != 3) fail(ErrorCode::Invalid, "denormalize expects a 3-channel tensor");
  RawImage raw(t.h, t.w);
  for (size_t i = 0; i < t.v.size(); ++i) {
    float v = std::round((t.v[i] + 1.0f) * 127.5f);
    raw.pixels[i] = uint8_t(std::min(255.0f, std::max(0.0f, v)));
  }
  return raw;
}

RawImage load_image(const std::string& path) {
  cv::Mat img = cv::imread(path, cv::IMREAD_COLOR);
  if (img.empty()) fail(ErrorCode::Io, "cannot decode image: " + path);
  cv::Mat rgb;
  cv::cvtColor(img, rgb, cv::COLOR_BGR2RGB);
  RawImage out(rgb.rows, rgb.cols);
  std::memcpy(out.pixels.data(), rgb.data, out.pixels.size());
  return out;
}

void save_png(const std::string& path, const RawImage& img) {
  cv::Mat rgb(img.height, img.width, CV_8UC3, const_cast<uint8_t*>(img.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path, bgr)) fail(ErrorCode::Io, "cannot write PNG: " + path);
}

RawImage resize_bilinear(const RawImage& img, int size) {
  cv::Mat src(img.height, img.width, CV_8UC3, const_cast<uint8_t*>(img.pixels.data()));
  cv::Mat dst;
  cv::resize(src, dst, cv::Size(size, size), 0, 0, cv::INTER_LINEAR);
  RawImage out(size, size);
  std::memcpy(out.pixels.data(), dst.data, out.pixels.size());
  return out;
}

TensorF load_normalized(const std::string& path, int size) {
  RawImage raw = load_image(path);
  if (raw.height != size || raw.width != size) raw = resize_bilinear(raw, size);
  return normalize(raw);
}

}  // namespace hdh

#include "style.hpp"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "errors.hpp"

using namespace hdh;

namespace {

StyleParams identity_params() {
  StyleParams p;
  p.matrix = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  p.gamma = {1.0, 1.0, 1.0};
  return p;
}

}  // namespace

TEST_CASE("identity parameters leave the image unchanged") {
  TensorF x(4, 4, 3);
  float v = -0.9f;
  for (auto& e : x.v) {
    e = v;
    v += 0.01f;
  }
  TensorF y = reference_transform(x, identity_params());
  REQUIRE(y.same_shape(x));
  for (size_t i = 0; i < x.v.size(); ++i) CHECK(y.v[i] == doctest::Approx(x.v[i]).epsilon(1e-5));
}

TEST_CASE("black stays black under the default mix") {
  TensorF x(2, 2, 3);
  x.fill(-1.0f);  // 0 in [0,1]
  TensorF y = reference_transform(x, StyleParams{});
  for (float e : y.v) CHECK(e == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("mid-gray through the default sepia mix, by hand") {
  TensorF x(1, 1, 3);
  x.fill(0.0f);  // 0.5 in [0,1]
  StyleParams p;
  TensorF y = reference_transform(x, p);
  for (int c = 0; c < 3; ++c) {
    double mixed = 0.5 * (p.matrix[3 * c] + p.matrix[3 * c + 1] + p.matrix[3 * c + 2]);
    mixed = std::min(1.0, std::max(0.0, mixed));
    double expect = 2.0 * std::pow(mixed, p.gamma[c]) - 1.0;
    CHECK(y.at(0, 0, c) == doctest::Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("output stays inside the normalized range") {
  TensorF x(8, 8, 3);
  float v = -1.0f;
  for (auto& e : x.v) {
    e = v;
    v = v >= 1.0f ? -1.0f : v + 0.011f;
  }
  TensorF y = reference_transform(x, StyleParams{});
  for (float e : y.v) {
    CHECK(e >= -1.0f);
    CHECK(e <= 1.0f);
  }
}

TEST_CASE("style image is deterministic and styled") {
  TensorF y1 = style_image(32, StyleParams{});
  TensorF y2 = style_image(32, StyleParams{});
  CHECK(y1.v == y2.v);
  TensorF base = canonical_base_image(32);
  TensorF expect = reference_transform(base, StyleParams{});
  CHECK(y1.v == expect.v);
}

TEST_CASE("builtin ground truth transforms the content image") {
  TensorF x = canonical_base_image(16);
  StyleSource src;
  TensorF gt = ground_truth_for("whatever.png", x, src, 16);
  TensorF expect = reference_transform(x, src.params);
  CHECK(gt.v == expect.v);
}

TEST_CASE("external ground truth requires the mirrored file") {
  StyleSource src;
  src.mode = StyleMode::ExternalDirectory;
  src.external_dir = (std::filesystem::temp_directory_path() / "hdh_no_such_dir").string();
  TensorF x(16, 16, 3);
  x.fill(0.0f);
  CHECK_THROWS_AS(ground_truth_for("img.png", x, src, 16), Error);
}

TEST_CASE("degenerate parameters are rejected") {
  StyleParams p;
  p.matrix = {0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(p.validate(), Error);
  p = StyleParams{};
  p.gamma = {1.0, -0.5, 1.0};
  CHECK_THROWS_AS(p.validate(), Error);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "difl/core.hpp"

namespace difl {

/// A stack of N grayscale images sharing one m x n geometry.
/// Pixels are stored as doubles in [0, 255], row-major per image.
struct ImageStack {
  int rows = 0;
  int cols = 0;
  std::size_t count = 0;
  std::vector<double> pixels;

  ImageStack() = default;
  ImageStack(int r, int c, std::size_t n)
      : rows(r), cols(c), count(n), pixels(static_cast<std::size_t>(r) * c * n, 0.0) {
    require(r >= 1 && c >= 1 && n >= 1, "ImageStack: dimensions must be positive");
  }

  std::size_t pixels_per_image() const { return static_cast<std::size_t>(rows) * cols; }

  double* image_data(std::size_t i) { return pixels.data() + i * pixels_per_image(); }
  const double* image_data(std::size_t i) const { return pixels.data() + i * pixels_per_image(); }

  RowMatrixMap image(std::size_t i) { return RowMatrixMap(image_data(i), rows, cols); }
  RowMatrixConstMap image(std::size_t i) const {
    return RowMatrixConstMap(image_data(i), rows, cols);
  }

  double& at(std::size_t i, int r, int c) { return pixels[i * pixels_per_image() + r * cols + c]; }
  double at(std::size_t i, int r, int c) const {
    return pixels[i * pixels_per_image() + r * cols + c];
  }
};

struct LabeledImageSet {
  ImageStack images;
  std::vector<int> labels;  // one class id per image, in [0, num_classes)

  int num_classes() const {
    int mx = -1;
    for (int l : labels) mx = std::max(mx, l);
    return mx + 1;
  }
};

/// Bilinear resample to a new geometry. Output pixel centers are mapped back
/// into the source grid and the four surrounding samples are blended.
inline ImageStack resize_bilinear(const ImageStack& in, int rows, int cols) {
  require(rows >= 1 && cols >= 1, "resize_bilinear: target dims must be positive");
  if (rows == in.rows && cols == in.cols) return in;
  ImageStack out(rows, cols, in.count);
  const double sr = static_cast<double>(in.rows) / rows;
  const double sc = static_cast<double>(in.cols) / cols;
  for (std::size_t i = 0; i < in.count; ++i) {
    for (int r = 0; r < rows; ++r) {
      double y = (r + 0.5) * sr - 0.5;
      y = std::clamp(y, 0.0, static_cast<double>(in.rows - 1));
      const int y0 = static_cast<int>(std::floor(y));
      const int y1 = std::min(y0 + 1, in.rows - 1);
      const double fy = y - y0;
      for (int c = 0; c < cols; ++c) {
        double x = (c + 0.5) * sc - 0.5;
        x = std::clamp(x, 0.0, static_cast<double>(in.cols - 1));
        const int x0 = static_cast<int>(std::floor(x));
        const int x1 = std::min(x0 + 1, in.cols - 1);
        const double fx = x - x0;
        const double top = in.at(i, y0, x0) * (1 - fx) + in.at(i, y0, x1) * fx;
        const double bot = in.at(i, y1, x0) * (1 - fx) + in.at(i, y1, x1) * fx;
        out.at(i, r, c) = top * (1 - fy) + bot * fy;
      }
    }
  }
  return out;
}

/// Split so that exactly `per_class_train` members of every class land in the
/// train half; the remainder forms the test half. Selection is a seeded
/// shuffle per class, so a fixed seed reproduces the exact same split.
/// Relative input order is preserved within each half.
inline std::pair<LabeledImageSet, LabeledImageSet> stratified_split(const LabeledImageSet& set,
                                                                    int per_class_train,
                                                                    std::uint64_t seed) {
  require(per_class_train >= 1, "stratified_split: per_class_train must be >= 1");
  require(set.labels.size() == set.images.count, "stratified_split: labels/images size mismatch");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < set.labels.size(); ++i) by_class[set.labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<char> in_train(set.images.count, 0);
  for (auto& [cls, idx] : by_class) {
    require(static_cast<int>(idx.size()) > per_class_train,
            "stratified_split: class " + std::to_string(cls) + " has too few members");
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int j = 0; j < per_class_train; ++j) in_train[idx[j]] = 1;
  }

  const std::size_t n_train =
      static_cast<std::size_t>(per_class_train) * by_class.size();
  LabeledImageSet train, test;
  train.images = ImageStack(set.images.rows, set.images.cols, n_train);
  test.images = ImageStack(set.images.rows, set.images.cols, set.images.count - n_train);
  const std::size_t px = set.images.pixels_per_image();
  std::size_t ti = 0, si = 0;
  for (std::size_t i = 0; i < set.images.count; ++i) {
    auto& dst = in_train[i] ? train : test;
    std::size_t& k = in_train[i] ? ti : si;
    std::copy_n(set.images.image_data(i), px, dst.images.image_data(k));
    dst.labels.push_back(set.labels[i]);
    ++k;
  }
  return {std::move(train), std::move(test)};
}

/// Built-in occluder used when none is supplied: a 16x16 checkerboard with
/// 4x4 cells alternating between 0 and 255.
inline ImageStack checkerboard_occluder() {
  ImageStack occ(16, 16, 1);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) occ.at(0, r, c) = ((r / 4 + c / 4) % 2 == 0) ? 255.0 : 0.0;
  return occ;
}

struct CorruptionSpec {
  enum class Kind { salt_pepper, gaussian, occlusion };

  Kind kind;
  double param = 0.0;  // density / stddev / area fraction
  std::uint64_t seed = 0;
  ImageStack occluder;  // occlusion only

  static CorruptionSpec salt_pepper(double density, std::uint64_t seed) {
    require(density > 0.0 && density < 1.0, "salt_pepper: density must be in (0,1)");
    return {Kind::salt_pepper, density, seed, {}};
  }
  static CorruptionSpec gaussian(double stddev, std::uint64_t seed) {
    require(stddev >= 0.0, "gaussian: stddev must be >= 0");
    return {Kind::gaussian, stddev, seed, {}};
  }
  static CorruptionSpec occlusion(double fraction, std::uint64_t seed,
                                  ImageStack occluder = checkerboard_occluder()) {
    require(fraction > 0.0 && fraction < 1.0, "occlusion: fraction must be in (0,1)");
    require(occluder.count == 1, "occlusion: occluder must hold exactly one image");
    return {Kind::occlusion, fraction, seed, std::move(occluder)};
  }
};

namespace detail {

// Per-image RNG stream; sub-seed derivation is seed XOR image index.
inline std::mt19937_64 image_rng(std::uint64_t seed, std::size_t index) {
  return std::mt19937_64(seed ^ static_cast<std::uint64_t>(index));
}

}  // namespace detail

/// Apply one corruption to every image. Pure: output is fully determined by
/// (images, spec). Pixel values stay within [0, 255].
inline ImageStack corrupt(const ImageStack& images, const CorruptionSpec& spec) {
  ImageStack out = images;
  const std::size_t mn = images.pixels_per_image();

  switch (spec.kind) {
    case CorruptionSpec::Kind::salt_pepper: {
      const std::size_t n_replace =
          static_cast<std::size_t>(spec.param * static_cast<double>(mn));
      for (std::size_t i = 0; i < images.count; ++i) {
        auto rng = detail::image_rng(spec.seed, i);
        std::vector<std::size_t> pos(mn);
        std::iota(pos.begin(), pos.end(), std::size_t{0});
        std::shuffle(pos.begin(), pos.end(), rng);
        std::bernoulli_distribution white(0.5);
        double* img = out.image_data(i);
        for (std::size_t j = 0; j < n_replace; ++j) img[pos[j]] = white(rng) ? 255.0 : 0.0;
      }
      break;
    }
    case CorruptionSpec::Kind::gaussian: {
      if (spec.param == 0.0) break;  // exact identity
      for (std::size_t i = 0; i < images.count; ++i) {
        auto rng = detail::image_rng(spec.seed, i);
        std::normal_distribution<double> noise(0.0, spec.param);
        double* img = out.image_data(i);
        for (std::size_t j = 0; j < mn; ++j)
          img[j] = std::clamp(img[j] + noise(rng), 0.0, 255.0);
      }
      break;
    }
    case CorruptionSpec::Kind::occlusion: {
      const int side = static_cast<int>(
          std::floor(std::sqrt(spec.param * static_cast<double>(mn))));
      require(side >= 1 && side <= std::min(images.rows, images.cols),
              "occlusion: patch does not fit inside the image");
      const ImageStack patch = resize_bilinear(spec.occluder, side, side);
      for (std::size_t i = 0; i < images.count; ++i) {
        auto rng = detail::image_rng(spec.seed, i);
        std::uniform_int_distribution<int> row_at(0, images.rows - side);
        std::uniform_int_distribution<int> col_at(0, images.cols - side);
        const int r0 = row_at(rng);
        const int c0 = col_at(rng);
        for (int r = 0; r < side; ++r)
          for (int c = 0; c < side; ++c) out.at(i, r0 + r, c0 + c) = patch.at(0, r, c);
      }
      break;
    }
  }
  return out;
}

}  // namespace difl

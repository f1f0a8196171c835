#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "difl/core.hpp"
#include "difl/patching.hpp"

namespace difl {

using BitMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Final-stage histogram settings. `bits` is the number of binary feature
/// images fused into one integer image (the last layer's output count).
struct HistogramConfig {
  int block_h1 = 7;
  int block_h2 = 7;
  double overlap = 0.5;  // Cr in [0,1)
  int bits = 8;

  int step_r() const { return std::max(1, static_cast<int>(std::floor(block_h1 * (1.0 - overlap)))); }
  int step_c() const { return std::max(1, static_cast<int>(std::floor(block_h2 * (1.0 - overlap)))); }
  int bins() const { return 1 << bits; }

  void validate() const {
    require(block_h1 >= 1 && block_h2 >= 1, "histogram: block dims must be >= 1");
    require(overlap >= 0.0 && overlap < 1.0, "histogram: overlap must be in [0,1)");
    require(bits >= 1 && bits <= 24, "histogram: bits out of range");
  }
};

/// One fused image of bits-wide integers, tagged with its parent group.
struct IntegerImage {
  BitMatrix values;  // entries in [0, 2^bits - 1]
  std::size_t parent = 0;
};

/// Heaviside step: 1 where the value is >= 0 (zero maps to 1), else 0.
inline BitMatrix binarize(const RowMatrix& img) {
  return (img.array() >= 0.0).cast<int>().matrix();
}

inline BitMatrix binarize(const FeatureImage& img) { return binarize(img.values); }

/// Weight plane l (1-based) by 2^(l-1) and sum.
inline IntegerImage fuse_integer(const std::vector<BitMatrix>& planes, std::size_t parent = 0) {
  require(!planes.empty(), "fuse_integer: no planes");
  IntegerImage out;
  out.parent = parent;
  out.values = BitMatrix::Zero(planes.front().rows(), planes.front().cols());
  for (std::size_t l = 0; l < planes.size(); ++l) {
    require(planes[l].rows() == out.values.rows() && planes[l].cols() == out.values.cols(),
            "fuse_integer: plane dims disagree");
    out.values += (1 << l) * planes[l];
  }
  return out;
}

/// Number of fully-inside blocks when sliding a block over an m x n image.
inline int block_count(int m, int n, const HistogramConfig& cfg) {
  require(cfg.block_h1 <= m && cfg.block_h2 <= n, "histogram: block larger than image");
  return ((m - cfg.block_h1) / cfg.step_r() + 1) * ((n - cfg.block_h2) / cfg.step_c() + 1);
}

/// Per-block value counts over the integer image. Blocks start at row
/// offsets 0, step_r, 2*step_r, ... (and likewise columns); only blocks that
/// fit entirely inside the image count. Output is block-major (blocks in
/// row-major scan order) with the 2^bits bins contiguous per block.
inline Vector block_histograms(const IntegerImage& T, const HistogramConfig& cfg) {
  cfg.validate();
  const int m = static_cast<int>(T.values.rows());
  const int n = static_cast<int>(T.values.cols());
  const int B = block_count(m, n, cfg);
  const int bins = cfg.bins();
  Vector hist = Vector::Zero(static_cast<Eigen::Index>(B) * bins);
  Eigen::Index base = 0;
  for (int r = 0; r + cfg.block_h1 <= m; r += cfg.step_r()) {
    for (int c = 0; c + cfg.block_h2 <= n; c += cfg.step_c()) {
      for (int a = 0; a < cfg.block_h1; ++a) {
        for (int b = 0; b < cfg.block_h2; ++b) {
          const int v = T.values(r + a, c + b);
          require(v >= 0 && v < bins, "block_histograms: value exceeds bit width");
          hist[base + v] += 1.0;
        }
      }
      base += bins;
    }
  }
  return hist;
}

/// Full output encoding for one source image: the layer-S feature images
/// arrive grouped by parent path (bits images per group, groups
/// consecutive); each group is binarized, fused into an integer image, and
/// histogrammed; group vectors are concatenated in parent order.
inline Vector encode(const std::vector<RowMatrix>& images, std::size_t groups,
                     const HistogramConfig& cfg) {
  cfg.validate();
  require(groups >= 1, "encode: need at least one group");
  require(images.size() == groups * static_cast<std::size_t>(cfg.bits),
          "encode: image count does not equal groups * bits");
  const int m = static_cast<int>(images.front().rows());
  const int n = static_cast<int>(images.front().cols());
  const Eigen::Index per_group = static_cast<Eigen::Index>(block_count(m, n, cfg)) * cfg.bins();
  Vector feature(per_group * static_cast<Eigen::Index>(groups));
  std::vector<BitMatrix> planes(static_cast<std::size_t>(cfg.bits));
  for (std::size_t g = 0; g < groups; ++g) {
    for (int l = 0; l < cfg.bits; ++l)
      planes[static_cast<std::size_t>(l)] = binarize(images[g * cfg.bits + l]);
    feature.segment(per_group * static_cast<Eigen::Index>(g), per_group) =
        block_histograms(fuse_integer(planes, g), cfg);
  }
  return feature;
}

inline Vector encode(const std::vector<FeatureImage>& images, std::size_t groups,
                     const HistogramConfig& cfg) {
  std::vector<RowMatrix> values;
  values.reserve(images.size());
  for (const FeatureImage& fi : images) values.push_back(fi.values);
  return encode(values, groups, cfg);
}

}  // namespace difl

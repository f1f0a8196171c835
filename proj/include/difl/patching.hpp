#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "difl/core.hpp"
#include "difl/image.hpp"

namespace difl {

/// Column-vectorized patches. Column j holds the flattened h1 x h2 window
/// centered at pixel j of its source image (row-major pixel scan, zero
/// padding at the edges). Columns of image i occupy the contiguous block i.
struct PatchMatrix {
  Matrix data;  // (h1*h2) x (m*n*count)
  int h1 = 0, h2 = 0;
  int m = 0, n = 0;
  std::size_t count = 0;
};

/// One m x n intermediate image plus where it came from: the source image
/// index and the flattened consequent path taken through the layers so far.
struct FeatureImage {
  RowMatrix values;
  std::size_t image_index = 0;
  std::size_t path_index = 0;
};

namespace detail {

// Zero padding makes any odd window well defined, even one larger than the
// image, so vectorization itself puts no upper bound on the patch dims.
inline void check_patch_dims(int h1, int h2, int, int) {
  require(h1 >= 1 && h2 >= 1, "patch dims must be >= 1");
  require(h1 % 2 == 1 && h2 % 2 == 1, "patch dims must be odd");
}

}  // namespace detail

/// Fill `out` (resized to h1*h2 x m*n) with the patch columns of one image.
/// Within a patch, window rows are emitted top to bottom, each left to
/// right, so the center pixel always sits at flat index (h1*h2 - 1) / 2.
inline void vectorize_into(const double* img, int m, int n, int h1, int h2, Matrix& out) {
  detail::check_patch_dims(h1, h2, m, n);
  const int pr = (h1 - 1) / 2;
  const int pc = (h2 - 1) / 2;
  out.resize(h1 * h2, static_cast<Eigen::Index>(m) * n);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      double* col = out.col(static_cast<Eigen::Index>(r) * n + c).data();
      for (int a = 0; a < h1; ++a) {
        const int sr = r + a - pr;
        const bool row_in = sr >= 0 && sr < m;
        for (int b = 0; b < h2; ++b) {
          const int sc = c + b - pc;
          col[a * h2 + b] = (row_in && sc >= 0 && sc < n) ? img[sr * n + sc] : 0.0;
        }
      }
    }
  }
}

inline PatchMatrix vectorize(const ImageStack& images, int h1, int h2) {
  detail::check_patch_dims(h1, h2, images.rows, images.cols);
  PatchMatrix pm;
  pm.h1 = h1;
  pm.h2 = h2;
  pm.m = images.rows;
  pm.n = images.cols;
  pm.count = images.count;
  const Eigen::Index mn = static_cast<Eigen::Index>(images.rows) * images.cols;
  pm.data.resize(h1 * h2, mn * static_cast<Eigen::Index>(images.count));
  Matrix block;
  for (std::size_t i = 0; i < images.count; ++i) {
    vectorize_into(images.image_data(i), images.rows, images.cols, h1, h2, block);
    pm.data.middleCols(static_cast<Eigen::Index>(i) * mn, mn) = block;
  }
  return pm;
}

inline PatchMatrix vectorize(const std::vector<FeatureImage>& images, int h1, int h2) {
  require(!images.empty(), "vectorize: no images");
  const int m = static_cast<int>(images.front().values.rows());
  const int n = static_cast<int>(images.front().values.cols());
  detail::check_patch_dims(h1, h2, m, n);
  PatchMatrix pm;
  pm.h1 = h1;
  pm.h2 = h2;
  pm.m = m;
  pm.n = n;
  pm.count = images.size();
  const Eigen::Index mn = static_cast<Eigen::Index>(m) * n;
  pm.data.resize(h1 * h2, mn * static_cast<Eigen::Index>(images.size()));
  Matrix block;
  for (std::size_t i = 0; i < images.size(); ++i) {
    require(images[i].values.rows() == m && images[i].values.cols() == n,
            "vectorize: mixed feature-image sizes");
    vectorize_into(images[i].values.data(), m, n, h1, h2, block);
    pm.data.middleCols(static_cast<Eigen::Index>(i) * mn, mn) = block;
  }
  return pm;
}

/// Inverse of the row-major pixel scan: values[r*n + c] becomes pixel (r,c).
inline FeatureImage reassemble(const Vector& values, int m, int n, std::size_t image_index = 0,
                               std::size_t path_index = 0) {
  require(values.size() == static_cast<Eigen::Index>(m) * n,
          "reassemble: value count does not equal m*n");
  FeatureImage fi;
  fi.values = RowMatrixConstMap(values.data(), m, n);
  fi.image_index = image_index;
  fi.path_index = path_index;
  return fi;
}

/// Streaming view of a patch matrix that is too large to materialize: the
/// columns come in fixed-size blocks (one source image per block) produced on
/// demand by a filler callback. Consumers iterate blocks in ascending order,
/// which keeps every multi-pass algorithm deterministic.
class PatchSequence {
 public:
  using Filler = std::function<void(std::size_t, Matrix&)>;

  PatchSequence(std::size_t blocks, int dim, int block_columns, Filler filler)
      : blocks_(blocks), dim_(dim), block_columns_(block_columns), filler_(std::move(filler)) {
    require(blocks >= 1 && dim >= 1 && block_columns >= 1, "PatchSequence: empty sequence");
  }

  static PatchSequence over(const ImageStack& images, int h1, int h2) {
    detail::check_patch_dims(h1, h2, images.rows, images.cols);
    const int m = images.rows, n = images.cols;
    return PatchSequence(images.count, h1 * h2, m * n,
                         [&images, m, n, h1, h2](std::size_t block, Matrix& out) {
                           vectorize_into(images.image_data(block), m, n, h1, h2, out);
                         });
  }

  std::size_t block_count() const { return blocks_; }
  int dim() const { return dim_; }
  int block_columns() const { return block_columns_; }
  std::size_t total_columns() const { return blocks_ * static_cast<std::size_t>(block_columns_); }

  void fill(std::size_t block, Matrix& out) const { filler_(block, out); }

 private:
  std::size_t blocks_;
  int dim_;
  int block_columns_;
  Filler filler_;
};

}  // namespace difl

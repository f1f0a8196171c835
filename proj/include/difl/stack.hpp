#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "difl/consequent_pca.hpp"
#include "difl/core.hpp"
#include "difl/fuzzy_antecedent.hpp"
#include "difl/image.hpp"
#include "difl/output_encoding.hpp"
#include "difl/patching.hpp"

namespace difl {

struct LayerConfig {
  int rules = 3;    // K
  int outputs = 8;  // L
  int h1 = 7;
  int h2 = 7;

  void validate() const {
    require(rules >= 1, "layer: rules must be >= 1");
    require(outputs >= 1, "layer: outputs must be >= 1");
    require(h1 >= 1 && h2 >= 1 && h1 % 2 == 1 && h2 % 2 == 1, "layer: patch dims must be odd");
    require(outputs <= rules * (h1 * h2 + 1), "layer: outputs exceed lifted dimension");
  }
};

struct LayerModel {
  FuzzyAntecedent antecedent;
  ProjectionBank bank;
  LayerConfig config;
};

struct TrainedModel {
  std::vector<LayerModel> layers;
  HistogramConfig output;
  int m = 0, n = 0;
  std::uint32_t format_version = 1;

  /// Feature images per input image after `s` layers (gamma(0) == 1).
  std::size_t gamma(std::size_t s) const {
    std::size_t g = 1;
    for (std::size_t t = 0; t < s && t < layers.size(); ++t)
      g *= static_cast<std::size_t>(layers[t].config.outputs);
    return g;
  }

  std::size_t feature_dim() const {
    const std::size_t B = static_cast<std::size_t>(block_count(m, n, output));
    return (std::size_t{1} << output.bits) * B * gamma(layers.size() - 1);
  }
};

namespace detail {

/// Push one image through the first `upto` layers with frozen parameters.
/// Returns the gamma(upto) feature images in path order (the child of
/// parent p through output l lands at index p * L + l).
inline std::vector<RowMatrix> forward_layers(const std::vector<LayerModel>& layers,
                                             const double* img, int m, int n, std::size_t upto) {
  std::vector<RowMatrix> current;
  current.emplace_back(RowMatrixConstMap(img, m, n));
  Matrix X, G;
  RowMatrix Z;
  for (std::size_t s = 0; s < upto; ++s) {
    const LayerModel& lm = layers[s];
    const int L = lm.config.outputs;
    std::vector<RowMatrix> next;
    next.reserve(current.size() * static_cast<std::size_t>(L));
    for (const RowMatrix& parent : current) {
      vectorize_into(parent.data(), m, n, lm.config.h1, lm.config.h2, X);
      G = lift(X, lm.antecedent);
      center_columns_in_place(G);
      Z = lm.bank.P.transpose() * G;  // row l is output image l, row-major scan
      for (int l = 0; l < L; ++l)
        next.emplace_back(RowMatrixConstMap(Z.row(l).data(), m, n));
    }
    current = std::move(next);
  }
  return current;
}

/// Streaming source of this layer's patch columns: one block per input
/// feature image, computed on demand by running the already-fitted layers.
/// Blocks arrive in ascending order across every pass, so the per-image
/// forward pass is cached and recomputed once per pass, not once per block.
inline PatchSequence layer_input(const ImageStack& train, const TrainedModel& model,
                                 std::size_t s, const LayerConfig& cfg) {
  const int m = train.rows, n = train.cols;
  if (s == 0) return PatchSequence::over(train, cfg.h1, cfg.h2);

  const std::size_t per_image = model.gamma(s);
  struct Cache {
    std::size_t image = static_cast<std::size_t>(-1);
    std::vector<RowMatrix> features;
  };
  auto cache = std::make_shared<Cache>();
  return PatchSequence(
      train.count * per_image, cfg.h1 * cfg.h2, m * n,
      [&train, &model, s, per_image, cache, h1 = cfg.h1, h2 = cfg.h2, m,
       n](std::size_t block, Matrix& out) {
        const std::size_t i = block / per_image;
        const std::size_t path = block % per_image;
        if (cache->image != i) {
          cache->features = forward_layers(model.layers, train.image_data(i), m, n, s);
          cache->image = i;
        }
        vectorize_into(cache->features[path].data(), m, n, h1, h2, out);
      });
}

}  // namespace detail

struct FitResult {
  TrainedModel model;
  /// Layer-S outputs of the training images (image-major, path order);
  /// empty when keep_feature_images was off.
  std::vector<FeatureImage> feature_images;
  /// Layer indices in the order fit visited them (forward-only check).
  std::vector<std::size_t> layer_visit_order;
  bool degenerate_clustering = false;
};

/// Fit the whole stack, one layer at a time, each layer solved once from the
/// data flowing through it: pooled patches -> Var-Part centers -> kernel
/// widths -> lifted covariance -> top-L eigenvectors. Never materializes the
/// pooled patch or lifted matrices; every pass streams per-image blocks in a
/// fixed order, so results are deterministic run to run.
inline FitResult fit(const ImageStack& train, const std::vector<LayerConfig>& layer_configs,
                     const HistogramConfig& output, bool keep_feature_images = true) {
  require(!layer_configs.empty(), "fit: need at least one layer");
  require(train.count >= 1, "fit: need at least one image");
  for (const LayerConfig& cfg : layer_configs) {
    cfg.validate();
    require(cfg.h1 <= train.rows && cfg.h2 <= train.cols, "fit: patch larger than image");
  }
  output.validate();
  require(output.bits == layer_configs.back().outputs,
          "fit: histogram bits must equal the last layer's output count");
  require(output.block_h1 <= train.rows && output.block_h2 <= train.cols,
          "fit: histogram block larger than image");

  FitResult result;
  TrainedModel& model = result.model;
  model.m = train.rows;
  model.n = train.cols;
  model.output = output;

  for (std::size_t s = 0; s < layer_configs.size(); ++s) {
    result.layer_visit_order.push_back(s);
    const LayerConfig& cfg = layer_configs[s];
    const PatchSequence seq = detail::layer_input(train, model, s, cfg);

    VarPartResult clusters = var_part(seq, cfg.rules);
    result.degenerate_clustering |= clusters.degenerate;
    FuzzyAntecedent antecedent;
    antecedent.centers = std::move(clusters.centers);
    antecedent.widths = kernel_widths(seq, antecedent.centers);

    const Eigen::Index R = static_cast<Eigen::Index>(cfg.rules) * (seq.dim() + 1);
    Matrix C = Matrix::Zero(R, R);
    Matrix X, G;
    for (std::size_t b = 0; b < seq.block_count(); ++b) {
      seq.fill(b, X);
      G = lift(X, antecedent);
      center_columns_in_place(G);
      C.selfadjointView<Eigen::Lower>().rankUpdate(G, 1.0);
    }
    C /= static_cast<double>(seq.total_columns());
    C.triangularView<Eigen::StrictlyUpper>() = C.transpose();

    LayerModel layer;
    layer.antecedent = std::move(antecedent);
    layer.bank = top_eigs(C, cfg.outputs);
    layer.config = cfg;
    model.layers.push_back(std::move(layer));
  }

  if (keep_feature_images) {
    const std::size_t per_image = model.gamma(model.layers.size());
    result.feature_images.reserve(train.count * per_image);
    for (std::size_t i = 0; i < train.count; ++i) {
      std::vector<RowMatrix> imgs = detail::forward_layers(model.layers, train.image_data(i),
                                                           train.rows, train.cols,
                                                           model.layers.size());
      for (std::size_t p = 0; p < imgs.size(); ++p) {
        FeatureImage fi;
        fi.values = std::move(imgs[p]);
        fi.image_index = i;
        fi.path_index = p;
        result.feature_images.push_back(std::move(fi));
      }
    }
  }
  return result;
}

/// Run frozen layers over a batch and encode: one feature column per image.
inline Matrix transform(const TrainedModel& model, const ImageStack& images) {
  require(!model.layers.empty(), "transform: model has no layers");
  require(images.rows == model.m && images.cols == model.n,
          "transform: image dims do not match model");
  const std::size_t S = model.layers.size();
  const std::size_t groups = model.gamma(S - 1);
  Matrix features(static_cast<Eigen::Index>(model.feature_dim()),
                  static_cast<Eigen::Index>(images.count));
  for (std::size_t i = 0; i < images.count; ++i) {
    const std::vector<RowMatrix> imgs =
        detail::forward_layers(model.layers, images.image_data(i), model.m, model.n, S);
    features.col(static_cast<Eigen::Index>(i)) = encode(imgs, groups, model.output);
  }
  return features;
}

}  // namespace difl

#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "difl/classifier.hpp"
#include "difl/core.hpp"
#include "difl/image.hpp"
#include "difl/stack.hpp"

namespace difl {

struct EvalSettings {
  std::vector<LayerConfig> layers;
  HistogramConfig hist;
  SvmConfig svm;
  bool baseline = false;
  std::optional<CorruptionSpec> corruption;
};

struct EvalReport {
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::size_t feature_dim = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::optional<double> baseline_train_acc;
  std::optional<double> baseline_test_acc;
  double fit_seconds = 0.0;
};

/// Raw pixels as a feature matrix, one flattened image per column.
inline Eigen::Map<const Matrix> raw_pixel_features(const ImageStack& images) {
  return Eigen::Map<const Matrix>(images.pixels.data(),
                                  static_cast<Eigen::Index>(images.pixels_per_image()),
                                  static_cast<Eigen::Index>(images.count));
}

/// Full classification experiment: corrupt per protocol, fit the feature
/// stack on the training images (or reuse a pre-fitted model), extract both
/// splits, train the SVM head, and score. Occlusion hits the test set only;
/// gaussian and salt & pepper noise hit both splits before fitting. The
/// optional raw-pixel baseline reuses the exact classifier settings.
inline EvalReport run_eval(const LabeledImageSet& train, const LabeledImageSet& test,
                           const EvalSettings& settings,
                           const TrainedModel* pretrained = nullptr) {
  ImageStack train_images = train.images;
  ImageStack test_images = test.images;
  if (settings.corruption) {
    const CorruptionSpec& spec = *settings.corruption;
    if (spec.kind != CorruptionSpec::Kind::occlusion) train_images = corrupt(train_images, spec);
    test_images = corrupt(test_images, spec);
  }

  EvalReport report;
  report.n_train = train_images.count;
  report.n_test = test_images.count;

  TrainedModel fitted_model;
  if (!pretrained) {
    const auto t0 = std::chrono::steady_clock::now();
    fitted_model = fit(train_images, settings.layers, settings.hist, false).model;
    report.fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  const TrainedModel& model = pretrained ? *pretrained : fitted_model;

  const Matrix f_train = transform(model, train_images);
  const Matrix f_test = transform(model, test_images);
  report.feature_dim = model.feature_dim();

  const LinearModel svm = fit_svm(f_train, train.labels, settings.svm);
  report.train_acc = accuracy(predict(svm, f_train), train.labels);
  report.test_acc = accuracy(predict(svm, f_test), test.labels);

  if (settings.baseline) {
    const Matrix raw_train = raw_pixel_features(train_images);
    const Matrix raw_test = raw_pixel_features(test_images);
    const LinearModel raw_svm = fit_svm(raw_train, train.labels, settings.svm);
    report.baseline_train_acc = accuracy(predict(raw_svm, raw_train), train.labels);
    report.baseline_test_acc = accuracy(predict(raw_svm, raw_test), test.labels);
  }
  return report;
}

}  // namespace difl

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "difl/core.hpp"

namespace difl {

struct SvmConfig {
  double lambda = 1e-4;
  int epochs = 20;
  std::uint64_t seed = 0;
  bool normalize = true;  // L2-normalize every feature vector before use
};

struct LinearModel {
  Matrix weights;  // numClasses x dim
  Vector bias;     // numClasses
  SvmConfig config;
};

namespace detail {

inline Matrix maybe_normalize(const Matrix& F, bool normalize) {
  if (!normalize) return F;
  Matrix out = F;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

inline std::mt19937_64 class_rng(std::uint64_t seed, int cls) {
  return std::mt19937_64(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(cls + 1)));
}

}  // namespace detail

/// One-vs-rest linear SVMs trained by stochastic subgradient descent on the
/// hinge loss with step size 1/(lambda*t) and a seeded shuffle per epoch.
/// The weight vector is kept as scale * direction so the per-step shrink is
/// O(1). The bias rides along as a constant-one input coordinate and shares
/// the regularizer; a free bias under 1/(lambda*t) steps takes an enormous
/// kick on the first steps and never recovers. Each class trains
/// independently from its own derived seed, so results do not depend on
/// class order. When objective_trace is given, it receives the regularized
/// training objective of the running-average iterate at each epoch end,
/// summed over classes; the average iterate is the quantity this SGD
/// actually drives down, so the trace decreases where the raw last iterate
/// jitters.
inline LinearModel fit_svm(const Matrix& F, const std::vector<int>& labels, const SvmConfig& cfg,
                           std::vector<double>* objective_trace = nullptr) {
  require(static_cast<std::size_t>(F.cols()) == labels.size(),
          "fit_svm: feature/label count mismatch");
  require(cfg.lambda > 0.0, "fit_svm: lambda must be positive");
  require(cfg.epochs >= 1, "fit_svm: epochs must be >= 1");
  int num_classes = 0;
  for (int l : labels) {
    require(l >= 0, "fit_svm: negative label");
    num_classes = std::max(num_classes, l + 1);
  }
  require(num_classes >= 2, "fit_svm: need at least two classes");

  const Matrix X = detail::maybe_normalize(F, cfg.normalize);
  const Eigen::Index dim = X.rows();
  const Eigen::Index N = X.cols();

  LinearModel model;
  model.weights = Matrix::Zero(num_classes, dim);
  model.bias = Vector::Zero(num_classes);
  model.config = cfg;
  if (objective_trace) objective_trace->assign(static_cast<std::size_t>(cfg.epochs), 0.0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  Vector v(dim + 1);  // last slot multiplies the implicit constant-one input
  for (int c = 0; c < num_classes; ++c) {
    auto rng = detail::class_rng(cfg.seed, c);
    v.setZero();
    double scale = 1.0;
    std::uint64_t t = 0;
    Vector avg_sum;
    if (objective_trace) avg_sum = Vector::Zero(dim + 1);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::shuffle(order.begin(), order.end(), rng);
      for (Eigen::Index i : order) {
        ++t;
        const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
        const double y = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        const auto x = X.col(i);
        const double margin = y * scale * (v.head(dim).dot(x) + v(dim));
        scale *= 1.0 - eta * cfg.lambda;
        if (scale <= 0.0) {  // exact at t == 1: the shrink wipes the history
          v.setZero();
          scale = 1.0;
        }
        if (margin < 1.0) {
          v.head(dim) += (eta * y / scale) * x;
          v(dim) += eta * y / scale;
        }
        if (objective_trace) avg_sum += scale * v;
      }
      if (objective_trace) {
        const Vector w = avg_sum / static_cast<double>(t);
        double hinge = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
          const double y = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
          hinge += std::max(0.0, 1.0 - y * (w.head(dim).dot(X.col(i)) + w(dim)));
        }
        (*objective_trace)[static_cast<std::size_t>(epoch)] +=
            0.5 * cfg.lambda * w.squaredNorm() + hinge / static_cast<double>(N);
      }
    }
    model.weights.row(c) = scale * v.head(dim).transpose();
    model.bias(c) = scale * v(dim);
  }
  return model;
}

/// Argmax of the class scores w^T x + b; ties go to the lowest class index.
inline std::vector<int> predict(const LinearModel& model, const Matrix& F) {
  require(F.rows() == model.weights.cols(), "predict: feature dim mismatch");
  const Matrix X = detail::maybe_normalize(F, model.config.normalize);
  const Matrix scores = (model.weights * X).colwise() + model.bias;
  std::vector<int> labels(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    int best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > scores(best, j)) best = static_cast<int>(c);
    labels[static_cast<std::size_t>(j)] = best;
  }
  return labels;
}

inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(predicted.size() == truth.size(), "accuracy: length mismatch");
  require(!truth.empty(), "accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace difl

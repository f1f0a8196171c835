#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "difl/classifier.hpp"

using namespace difl;

namespace {

struct Dataset {
  Matrix F;
  std::vector<int> labels;
};

// 2-D points linearly separable along (1,1)/sqrt(2) with margin >= 0.5:
// each point sits at least 0.5 from the separating line, plus arbitrary
// displacement parallel to it.
Dataset separable_set(int n, std::uint64_t seed) {
  const Eigen::Vector2d along(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  const Eigen::Vector2d across(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> margin_dist(0.5, 2.0);
  std::uniform_real_distribution<double> slide_dist(-2.0, 2.0);

  Dataset data;
  data.F.resize(2, n);
  data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const Eigen::Vector2d x = sign * margin_dist(rng) * along + slide_dist(rng) * across;
    data.F.col(i) = x;
    data.labels[static_cast<std::size_t>(i)] = sign > 0 ? 1 : 0;
  }
  return data;
}

// Three gaussian blobs with well separated centers.
Dataset blob_set(int per_class, std::uint64_t seed) {
  const double centers[3][2] = {{4.0, 0.0}, {0.0, 4.0}, {-4.0, -4.0}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.6);

  Dataset data;
  data.F.resize(2, 3 * per_class);
  data.labels.resize(static_cast<std::size_t>(3 * per_class));
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < per_class; ++i) {
      const int j = c * per_class + i;
      data.F(0, j) = centers[c][0] + noise(rng);
      data.F(1, j) = centers[c][1] + noise(rng);
      data.labels[static_cast<std::size_t>(j)] = c;
    }
  return data;
}

double majority_rate(const std::vector<int>& labels) {
  std::map<int, std::size_t> counts;
  for (int l : labels) ++counts[l];
  std::size_t best = 0;
  for (const auto& [cls, n] : counts) best = std::max(best, n);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

}  // namespace

TEST_CASE("separable pair is classified correctly", "[classifier]") {
  Matrix F(2, 2);
  F << 1, 0, 0, 1;  // (1,0) -> class 0, (0,1) -> class 1
  const std::vector<int> labels{0, 1};
  SvmConfig cfg;
  cfg.epochs = 50;
  const LinearModel model = fit_svm(F, labels, cfg);
  REQUIRE(predict(model, F) == labels);
  REQUIRE(model.weights.allFinite());
  REQUIRE(model.bias.allFinite());
}

TEST_CASE("same seed gives identical weights", "[classifier]") {
  const Dataset data = blob_set(30, 11);
  SvmConfig cfg;
  cfg.seed = 42;
  const LinearModel a = fit_svm(data.F, data.labels, cfg);
  const LinearModel b = fit_svm(data.F, data.labels, cfg);
  REQUIRE(a.weights == b.weights);
  REQUIRE(a.bias == b.bias);
}

TEST_CASE("200 separable points reach perfect training accuracy", "[classifier]") {
  const Dataset data = separable_set(200, 3);
  SvmConfig cfg;
  cfg.lambda = 1e-3;
  cfg.epochs = 200;
  const LinearModel model = fit_svm(data.F, data.labels, cfg);
  REQUIRE(accuracy(predict(model, data.F), data.labels) == 1.0);
}

TEST_CASE("training objective is non-increasing over epochs", "[classifier]") {
  const Dataset data = separable_set(200, 3);
  SvmConfig cfg;
  cfg.lambda = 1e-3;
  cfg.epochs = 40;
  std::vector<double> trace;
  fit_svm(data.F, data.labels, cfg, &trace);
  REQUIRE(trace.size() == 40);
  for (std::size_t e = 1; e < trace.size(); ++e)
    REQUIRE(trace[e] <= trace[e - 1] + 1e-9);
}

TEST_CASE("predict takes the argmax with ties to the lowest class", "[classifier]") {
  LinearModel model;
  model.weights = Matrix::Identity(2, 2);  // rows e0, e1
  model.bias = Vector::Zero(2);
  model.config.normalize = false;

  Matrix x(2, 1);
  x << 1, 0;
  REQUIRE(predict(model, x) == std::vector<int>{0});
  x << 0, 1;
  REQUIRE(predict(model, x) == std::vector<int>{1});

  LinearModel zero;
  zero.weights = Matrix::Zero(3, 2);
  zero.bias = Vector::Zero(3);
  Matrix any(2, 4);
  any << 1, -2, 0, 5, 3, 4, 0, -1;
  REQUIRE(predict(zero, any) == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("trained model beats the majority-vote oracle", "[classifier]") {
  const Dataset data = blob_set(40, 17);
  const LinearModel model = fit_svm(data.F, data.labels, SvmConfig{});
  const double acc = accuracy(predict(model, data.F), data.labels);
  REQUIRE(acc >= majority_rate(data.labels));
}

TEST_CASE("predictions are invariant to scaling all scores", "[classifier]") {
  const Dataset data = blob_set(25, 23);
  LinearModel model = fit_svm(data.F, data.labels, SvmConfig{});
  const std::vector<int> before = predict(model, data.F);
  model.weights *= 3.7;
  model.bias *= 3.7;
  REQUIRE(predict(model, data.F) == before);
}

TEST_CASE("accuracy counts exact matches", "[classifier]") {
  REQUIRE(accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  REQUIRE(accuracy({0, 0}, {1, 1}) == 0.0);
  REQUIRE(accuracy({0, 1, 1, 0}, {0, 1, 0, 0}) == 0.75);
  REQUIRE_THROWS_AS(accuracy({0, 1}, {0}), std::invalid_argument);
  REQUIRE_THROWS_AS(accuracy({}, {}), std::invalid_argument);
}

TEST_CASE("fit and predict validate their inputs", "[classifier]") {
  Matrix F(2, 3);
  F.setRandom();
  REQUIRE_THROWS_AS(fit_svm(F, {0, 0, 0}, SvmConfig{}), std::invalid_argument);
  REQUIRE_THROWS_AS(fit_svm(F, {0, 1}, SvmConfig{}), std::invalid_argument);

  SvmConfig bad;
  bad.lambda = 0.0;
  REQUIRE_THROWS_AS(fit_svm(F, {0, 1, 1}, bad), std::invalid_argument);

  const LinearModel model = fit_svm(F, {0, 1, 1}, SvmConfig{});
  REQUIRE_THROWS_AS(predict(model, Matrix::Zero(3, 1)), std::invalid_argument);
}

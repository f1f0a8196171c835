#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately naive: straight loops, no shared code
// with the headers under test.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd naive_matmul(const MatrixXd& A, const MatrixXd& B) {
  MatrixXd C = MatrixXd::Zero(A.rows(), B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < B.cols(); ++j)
      for (Eigen::Index k = 0; k < A.cols(); ++k) C(i, j) += A(i, k) * B(k, j);
  return C;
}

inline MatrixXd naive_covariance(const MatrixXd& G) {
  MatrixXd C = MatrixXd::Zero(G.rows(), G.rows());
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index a = 0; a < G.rows(); ++a)
      for (Eigen::Index b = 0; b < G.rows(); ++b) C(a, b) += G(a, j) * G(b, j);
  return C / static_cast<double>(G.cols());
}

struct EigenPairs {
  VectorXd values;
  MatrixXd vectors;
};

/// Shifted power iteration with deflation. The shift makes every eigenvalue
/// positive so the dominant eigenvalue of the shifted matrix is the largest
/// ALGEBRAIC eigenvalue of the input, which is what a top-L selection wants.
inline EigenPairs power_iteration_eigs(const MatrixXd& C, int L, std::uint64_t seed) {
  const Eigen::Index n = C.rows();
  const double shift = C.norm() + 1.0;
  MatrixXd A = C + shift * MatrixXd::Identity(n, n);
  const double scale = A.norm();

  EigenPairs out;
  out.values.resize(L);
  out.vectors.resize(n, L);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int l = 0; l < L; ++l) {
    VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
    v.normalize();
    double lambda = 0.0;
    for (int iter = 0; iter < 500000; ++iter) {
      VectorXd w = A * v;
      lambda = v.dot(w);
      const double residual = (w - lambda * v).norm();
      v = w / w.norm();
      if (residual <= 1e-12 * scale) break;
    }
    out.values(l) = lambda - shift;
    out.vectors.col(l) = v;
    A -= lambda * v * v.transpose();
  }
  return out;
}

/// One application of the divisive split rule to a single cluster: split at
/// the mean of the max-variance dimension. Returns 0/1 assignments
/// (x <= mean goes to side 0). Ties on variance go to the lowest dimension.
inline std::vector<int> split_rule_reference(const MatrixXd& points) {
  const Eigen::Index d = points.rows();
  const Eigen::Index n = points.cols();
  int best_dim = 0;
  double best_var = -1.0;
  for (Eigen::Index p = 0; p < d; ++p) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) mean += points(p, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) var += (points(p, j) - mean) * (points(p, j) - mean);
    if (var > best_var) {
      best_var = var;
      best_dim = static_cast<int>(p);
    }
  }
  double mean = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) mean += points(best_dim, j);
  mean /= static_cast<double>(n);
  std::vector<int> side(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    side[static_cast<std::size_t>(j)] = points(best_dim, j) <= mean ? 0 : 1;
  return side;
}

inline double partition_sse(const MatrixXd& points, const std::vector<int>& side) {
  double sse = 0.0;
  for (int s = 0; s < 2; ++s) {
    Eigen::Index count = 0;
    VectorXd mean = VectorXd::Zero(points.rows());
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      if (side[static_cast<std::size_t>(j)] == s) {
        mean += points.col(j);
        ++count;
      }
    if (count == 0) continue;
    mean /= static_cast<double>(count);
    for (Eigen::Index j = 0; j < points.cols(); ++j)
      if (side[static_cast<std::size_t>(j)] == s) sse += (points.col(j) - mean).squaredNorm();
  }
  return sse;
}

/// SSE of every split reachable by the rule family "threshold one dimension
/// at one of the data values" (superset of the mean-threshold rule).
inline std::vector<double> threshold_split_sses(const MatrixXd& points) {
  std::vector<double> sses;
  for (Eigen::Index p = 0; p < points.rows(); ++p) {
    for (Eigen::Index t = 0; t < points.cols(); ++t) {
      const double thr = points(p, t);
      std::vector<int> side(static_cast<std::size_t>(points.cols()));
      int hi = 0;
      for (Eigen::Index j = 0; j < points.cols(); ++j) {
        side[static_cast<std::size_t>(j)] = points(p, j) <= thr ? 0 : 1;
        hi += side[static_cast<std::size_t>(j)];
      }
      if (hi == 0 || hi == static_cast<int>(points.cols())) continue;
      sses.push_back(partition_sse(points, side));
    }
  }
  return sses;
}

}  // namespace oracles

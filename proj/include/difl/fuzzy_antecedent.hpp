#pragma once

#include <cstdint>
#include <vector>

#include "difl/core.hpp"
#include "difl/patching.hpp"

namespace difl {

/// Gaussian rule antecedents for one layer: center C_p^k and width D_p^k per
/// rule k and input dimension p. Widths are stored after the [1,10] rescale.
struct FuzzyAntecedent {
  Matrix centers;  // K x d
  Matrix widths;   // K x d, every entry in [1,10]

  int rules() const { return static_cast<int>(centers.rows()); }
  int dim() const { return static_cast<int>(centers.cols()); }
};

struct VarPartResult {
  Matrix centers;  // K x d
  bool degenerate = false;
};

/// Deterministic divisive clustering: start from one cluster holding every
/// column, then K-1 times split the cluster with the largest within-cluster
/// SSE along its largest-variance dimension at that dimension's mean
/// (x <= mean stays in the parent slot, the rest forms a new cluster
/// appended at the end). Ties always resolve to the lowest index. When the
/// chosen cluster has zero SSE (all members identical) the split would leave
/// one side empty; instead its center is duplicated and the result is
/// flagged degenerate.
inline VarPartResult var_part(const PatchSequence& data, int K) {
  const int d = data.dim();
  const std::size_t total = data.total_columns();
  require(K >= 1, "var_part: K must be >= 1");
  require(static_cast<std::size_t>(K) <= total, "var_part: K exceeds column count");
  require(K <= 65535, "var_part: K exceeds assignment storage");

  Matrix sum = Matrix::Zero(K, d);
  Matrix sumsq = Matrix::Zero(K, d);
  std::vector<double> count(K, 0.0);
  std::vector<std::uint16_t> assign(total, 0);

  Matrix block;
  for (std::size_t b = 0; b < data.block_count(); ++b) {
    data.fill(b, block);
    sum.row(0) += block.rowwise().sum();
    sumsq.row(0) += block.array().square().rowwise().sum().matrix();
  }
  count[0] = static_cast<double>(total);

  bool degenerate = false;
  for (int t = 1; t < K; ++t) {
    // within-cluster SSE per existing cluster, from running moments
    int best = 0;
    double best_sse = -1.0;
    for (int k = 0; k < t; ++k) {
      if (count[k] == 0.0) continue;
      double sse = 0.0;
      for (int p = 0; p < d; ++p) sse += sumsq(k, p) - sum(k, p) * sum(k, p) / count[k];
      if (sse > best_sse) {
        best_sse = sse;
        best = k;
      }
    }

    const auto duplicate_center = [&](int src) {
      // phantom single point at the source center: keeps the slot's mean
      // right and its SSE at zero for later iterations
      const Vector c = sum.row(src).transpose() / count[src];
      sum.row(t) = c.transpose();
      sumsq.row(t) = c.array().square().transpose();
      count[t] = 1.0;
      degenerate = true;
    };

    if (best_sse <= 0.0) {
      duplicate_center(best);
      continue;
    }

    int split_dim = 0;
    double split_sse = -1.0;
    for (int p = 0; p < d; ++p) {
      const double s = sumsq(best, p) - sum(best, p) * sum(best, p) / count[best];
      if (s > split_sse) {
        split_sse = s;
        split_dim = p;
      }
    }
    const double threshold = sum(best, split_dim) / count[best];

    Vector sum1 = Vector::Zero(d), sum2 = Vector::Zero(d);
    Vector sq1 = Vector::Zero(d), sq2 = Vector::Zero(d);
    double n1 = 0.0, n2 = 0.0;
    std::size_t g = 0;
    for (std::size_t b = 0; b < data.block_count(); ++b) {
      data.fill(b, block);
      for (Eigen::Index j = 0; j < block.cols(); ++j, ++g) {
        if (assign[g] != static_cast<std::uint16_t>(best)) continue;
        const auto col = block.col(j);
        if (col(split_dim) <= threshold) {
          sum1 += col;
          sq1 += col.array().square().matrix();
          n1 += 1.0;
        } else {
          assign[g] = static_cast<std::uint16_t>(t);
          sum2 += col;
          sq2 += col.array().square().matrix();
          n2 += 1.0;
        }
      }
    }

    if (n1 == 0.0 || n2 == 0.0) {
      // numerically flat cluster slipped past the SSE gate; undo and duplicate
      for (auto& a : assign)
        if (a == static_cast<std::uint16_t>(t)) a = static_cast<std::uint16_t>(best);
      duplicate_center(best);
      continue;
    }
    sum.row(best) = sum1.transpose();
    sumsq.row(best) = sq1.transpose();
    count[best] = n1;
    sum.row(t) = sum2.transpose();
    sumsq.row(t) = sq2.transpose();
    count[t] = n2;
  }

  VarPartResult result;
  result.centers.resize(K, d);
  for (int k = 0; k < K; ++k) result.centers.row(k) = sum.row(k) / count[k];
  result.degenerate = degenerate;
  return result;
}

inline PatchSequence sequence_over(const PatchMatrix& pm) {
  return PatchSequence(1, static_cast<int>(pm.data.rows()), static_cast<int>(pm.data.cols()),
                       [&pm](std::size_t, Matrix& out) { out = pm.data; });
}

inline PatchSequence sequence_over(const Matrix& data) {
  return PatchSequence(1, static_cast<int>(data.rows()), static_cast<int>(data.cols()),
                       [&data](std::size_t, Matrix& out) { out = data; });
}

inline VarPartResult var_part(const PatchMatrix& data, int K) {
  return var_part(sequence_over(data), K);
}
inline VarPartResult var_part(const Matrix& data, int K) {
  return var_part(sequence_over(data), K);
}

/// Min-max rescale of raw widths into [1,10], independently per dimension
/// across the K rules. A dimension whose K raw values coincide maps to the
/// midpoint 5.5.
inline Matrix scale_widths(const Matrix& raw) {
  const int K = static_cast<int>(raw.rows());
  const int d = static_cast<int>(raw.cols());
  Matrix out(K, d);
  for (int p = 0; p < d; ++p) {
    const double lo = raw.col(p).minCoeff();
    const double hi = raw.col(p).maxCoeff();
    if (hi == lo) {
      out.col(p).setConstant(5.5);
    } else {
      // clamp: rounding in the affine map can overshoot the endpoints by an ulp
      out.col(p) =
          (1.0 + 9.0 * (raw.col(p).array() - lo) / (hi - lo)).cwiseMax(1.0).cwiseMin(10.0);
    }
  }
  return out;
}

/// Raw kernel width of rule k in dimension p is the squared deviation of
/// EVERY column from that rule's center, summed over the whole data set
/// (not just the rule's own cluster); the [1,10] rescale follows.
inline Matrix kernel_widths(const PatchSequence& data, const Matrix& centers) {
  const int d = data.dim();
  require(static_cast<int>(centers.cols()) == d, "kernel_widths: center dim mismatch");
  Vector sum = Vector::Zero(d);
  Vector sumsq = Vector::Zero(d);
  Matrix block;
  for (std::size_t b = 0; b < data.block_count(); ++b) {
    data.fill(b, block);
    sum += block.rowwise().sum();
    sumsq += block.array().square().rowwise().sum().matrix();
  }
  const double N = static_cast<double>(data.total_columns());
  // sum_i (x_ip - C)^2 = sum x^2 - 2 C sum x + N C^2
  const int K = static_cast<int>(centers.rows());
  Matrix raw(K, d);
  for (int k = 0; k < K; ++k)
    raw.row(k) = sumsq.transpose() - 2.0 * centers.row(k).cwiseProduct(sum.transpose()) +
                 N * centers.row(k).array().square().matrix();
  return scale_widths(raw.cwiseMax(0.0));
}

inline Matrix kernel_widths(const PatchMatrix& data, const Matrix& centers) {
  return kernel_widths(sequence_over(data), centers);
}
inline Matrix kernel_widths(const Matrix& data, const Matrix& centers) {
  return kernel_widths(sequence_over(data), centers);
}

/// Unnormalized log firing levels, one row per rule:
/// log mu^k(x) = -sum_p (x_p - C_p^k)^2 / (2 D_p^k).
inline Matrix log_firing_levels(const Matrix& X, const FuzzyAntecedent& a) {
  require(X.rows() == a.centers.cols(), "firing_levels: input dim mismatch");
  const int K = a.rules();
  Matrix logf(K, X.cols());
  for (int k = 0; k < K; ++k) {
    const Eigen::ArrayXd inv2d = 0.5 / a.widths.row(k).transpose().array();
    logf.row(k) = -((X.colwise() - a.centers.row(k).transpose()).array().square().colwise() *
                    inv2d)
                       .colwise()
                       .sum();
  }
  return logf;
}

/// Normalized firing levels: softmax of the log firing levels per column.
/// Subtracting the column max before exponentiating keeps the sum exactly 1
/// even when every rule is dozens of widths away from the input.
inline Matrix firing_levels(const Matrix& X, const FuzzyAntecedent& a) {
  Matrix mu = log_firing_levels(X, a);
  for (Eigen::Index j = 0; j < mu.cols(); ++j) {
    auto col = mu.col(j);
    col = (col.array() - col.maxCoeff()).exp();
    col /= col.sum();
  }
  return mu;
}

inline Vector firing_levels(const Vector& x, const FuzzyAntecedent& a) {
  return firing_levels(Matrix(x), a).col(0);
}

/// Lift columns into the hidden space: column x with normalized firing
/// levels mu becomes the K(d+1)-vector of stacked blocks mu^k * (1, x^T)^T.
inline Matrix lift(const Matrix& X, const Matrix& mu) {
  require(X.cols() == mu.cols(), "lift: column count mismatch");
  const int d = static_cast<int>(X.rows());
  const int K = static_cast<int>(mu.rows());
  Matrix G(static_cast<Eigen::Index>(K) * (d + 1), X.cols());
  for (int k = 0; k < K; ++k) {
    G.row(static_cast<Eigen::Index>(k) * (d + 1)) = mu.row(k);
    G.middleRows(static_cast<Eigen::Index>(k) * (d + 1) + 1, d) =
        X.array().rowwise() * mu.row(k).array();
  }
  return G;
}

inline Matrix lift(const Matrix& X, const FuzzyAntecedent& a) {
  require(X.rows() == a.centers.cols(), "lift: input dim does not match antecedent");
  return lift(X, firing_levels(X, a));
}

inline Matrix lift(const PatchMatrix& patches, const FuzzyAntecedent& a) {
  return lift(patches.data, a);
}

}  // namespace difl

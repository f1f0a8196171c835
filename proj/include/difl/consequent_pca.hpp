#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "difl/core.hpp"

namespace difl {

/// Consequent parameters of the multi-output TSK system: column l of P is
/// the l-th output's coefficient vector over the lifted space, with its
/// eigenvalue; columns are orthonormal and eigenvalues descend.
struct ProjectionBank {
  Matrix P;            // K(d+1) x L
  Vector eigenvalues;  // length L, non-increasing
};

/// Remove each column's own scalar mean from its entries.
inline void center_columns_in_place(Matrix& G) {
  G.rowwise() -= G.colwise().mean();
}

inline Matrix center_columns(const Matrix& G) {
  Matrix out = G;
  center_columns_in_place(out);
  return out;
}

/// Cmat = G G^T / columns. No Bessel correction.
inline Matrix covariance(const Matrix& G) {
  require(G.cols() >= 1, "covariance: need at least one column");
  Matrix C = Matrix::Zero(G.rows(), G.rows());
  C.selfadjointView<Eigen::Lower>().rankUpdate(G, 1.0 / static_cast<double>(G.cols()));
  C.triangularView<Eigen::StrictlyUpper>() = C.transpose();
  return C;
}

struct SymmetricEigen {
  Matrix vectors;  // orthonormal columns
  Vector values;   // descending
};

namespace detail {

inline double off_diagonal_norm(const Matrix& A) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < A.rows(); ++p)
    for (Eigen::Index q = p + 1; q < A.cols(); ++q) s += 2.0 * A(p, q) * A(p, q);
  return std::sqrt(s);
}

// Flip each column so its largest-magnitude entry is positive; among equal
// magnitudes the lowest index decides. Makes the decomposition bit-stable.
inline void fix_signs(Matrix& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (V(pivot, j) < 0.0) V.col(j) = -V.col(j);
  }
}

}  // namespace detail

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Sweeps run until the off-diagonal Frobenius norm drops below
/// 1e-12 * ||C||_F, capped at 100 sweeps. Results are sorted by descending
/// eigenvalue (stable under ties) with a deterministic sign convention.
inline SymmetricEigen jacobi_eigen(const Matrix& C) {
  require(C.rows() == C.cols() && C.rows() >= 1, "jacobi_eigen: matrix must be square");
  const double magnitude = C.cwiseAbs().maxCoeff();
  require((C - C.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, magnitude),
          "jacobi_eigen: matrix is not symmetric");

  const Eigen::Index n = C.rows();
  Matrix A = C;
  Matrix V = Matrix::Identity(n, n);
  const double threshold = 1e-12 * C.norm();

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (detail::off_diagonal_norm(A) < threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        // rotation angle that zeroes A(p,q) in A' = J^T A J
        const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(tau * tau + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        A(p, p) -= t * apq;
        A(q, q) += t * apq;
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(p, i) = A(i, p);
          A(i, q) = s * aip + c * aiq;
          A(q, i) = A(i, q);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&A](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = A(order[j], order[j]);
    out.vectors.col(j) = V.col(order[j]);
  }
  detail::fix_signs(out.vectors);
  return out;
}

/// Keep the L largest-eigenvalue pairs.
inline ProjectionBank top_eigs(const Matrix& Cmat, int L) {
  require(L >= 1 && L <= Cmat.rows(), "top_eigs: L out of range");
  SymmetricEigen full = jacobi_eigen(Cmat);
  ProjectionBank bank;
  bank.P = full.vectors.leftCols(L);
  bank.eigenvalues = full.values.head(L);
  return bank;
}

/// Z = P^T G, one output row per consequent group.
inline Matrix project(const ProjectionBank& bank, const Matrix& G) {
  require(bank.P.rows() == G.rows(), "project: row dims disagree");
  return bank.P.transpose() * G;
}

}  // namespace difl

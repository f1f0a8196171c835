#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace difl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Row-major view type for images stored in scan order.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixMap = Eigen::Map<RowMatrix>;
using RowMatrixConstMap = Eigen::Map<const RowMatrix>;

/// Thrown when a file does not match its expected on-disk format.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace difl

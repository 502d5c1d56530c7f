#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace frl {

// Dense row-major matrix of 64-bit reals. The single carrier type for
// weights, factors, gradients and products throughout the library.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Index = Eigen::Index;

inline bool is_finite(const Matrix& m) {
  return m.allFinite();
}

/// Throws std::invalid_argument("non-finite matrix") unless every entry is finite.
inline void require_finite(const Matrix& m, const char* what = "non-finite matrix") {
  if (!m.allFinite()) throw std::invalid_argument(what);
}

inline void require_nonempty(const Matrix& m) {
  if (m.rows() <= 0 || m.cols() <= 0) throw std::invalid_argument("empty matrix");
}

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

}  // namespace frl

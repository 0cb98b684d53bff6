#pragma once

#include <utility>

#include "lrr/numerics.hpp"
#include "lrr/rng.hpp"

namespace lrr::testing {

inline Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix x(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      x(i, j) = rng.next_gaussian();
    }
  }
  return x;
}

inline Matrix random_low_rank(Rng& rng, int rows, int cols, int rank) {
  return random_matrix(rng, rows, rank) * random_matrix(rng, cols, rank).transpose();
}

// Q factor of a Gaussian matrix: Haar-ish orthogonal, deterministic per rng.
inline Matrix random_orthogonal(Rng& rng, int n) {
  const Matrix g = random_matrix(rng, n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

// Matrix with prescribed singular values and random singular vectors.
inline Matrix matrix_with_sigma(Rng& rng, int rows, int cols, const Vector& sigma) {
  const Matrix u = random_orthogonal(rng, rows);
  const Matrix v = random_orthogonal(rng, cols);
  return u.leftCols(sigma.size()) * sigma.asDiagonal() *
         v.leftCols(sigma.size()).transpose();
}

}  // namespace lrr::testing

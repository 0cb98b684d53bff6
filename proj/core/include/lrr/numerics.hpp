#pragma once

#include <Eigen/Dense>

namespace lrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Full singular value decomposition X = U diag(sigma) V^T with square U
// (rows x rows) and V (cols x cols); sigma holds min(rows, cols) values in
// non-increasing order. The square factors matter: block constructions
// downstream index singular vectors past the numerical rank.
struct SvdFactors {
  Matrix u;
  Vector sigma;
  Matrix v;

  Matrix reconstruct() const;
};

SvdFactors svd(const Matrix& x);

// Singular values only, non-increasing. Cheaper than svd() when the vectors
// are not needed.
Vector singular_values(const Matrix& x);

// Best rank-r approximation in Frobenius norm (Eckart-Young), 1 <= r <= min(m, n).
Matrix truncate_rank(const Matrix& x, int r);

double frobenius_norm(const Matrix& x);

// Sum of singular values.
double nuclear_norm(const Matrix& x);

// Diagnostic rank with cutoff sigma[0] * max(rows, cols) * 1e-12. Never used
// inside the solvers.
int numerical_rank(const Matrix& x);
int numerical_rank(const Vector& sigma, int rows, int cols);

namespace detail {

// Internal decomposition with economy-size factors (u: m x k, v: n x k,
// k = min(m, n)); shared by the thresholding and projection loops.
struct ThinSvd {
  Matrix u;
  Vector sigma;
  Matrix v;
};

ThinSvd thin_svd(const Matrix& x);

}  // namespace detail

}  // namespace lrr

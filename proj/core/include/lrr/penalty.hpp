#pragma once

#include "lrr/numerics.hpp"

namespace lrr {

// Scale parameter of the fraction function rho_a(t) = a|t| / (a|t| + 1).
// Any a > 0 is a valid penalty; the recovery theory additionally needs a > 1,
// which is enforced only by the operations that rely on it.
struct FractionParam {
  double a;

  explicit FractionParam(double a_);
};

// rho_a(t): even, zero at zero, strictly increasing on [0, inf), supremum 1.
double rho(FractionParam p, double t);

// P_a(X) = sum_i rho_a(sigma_i(X)). Lies in [0, rank(X)]; approaches the rank
// as a grows.
double penalty_value(FractionParam p, const Matrix& x);
// Same, from already-computed singular values.
double penalty_from_sigma(FractionParam p, const Vector& sigma);

// Singular value soft thresholding: shrink every singular value by lambda/2
// and drop the negative part. Unique minimizer of ||X - Y||_F^2 + lambda*||X||_*.
Matrix soft_threshold(const Matrix& y, double lambda);

// Element of the generalized gradient of h(X) = lambda*||X||_* - lambda*P_a(X):
// U diag(lambda - lambda*a / (a*sigma_i + 1)^2) V^T on the SVD of X, with the
// zero element chosen at sigma_i = 0.
Matrix dc_subgradient(const Matrix& x, double lambda, FractionParam p);

// Smallest beta guaranteeing P_a(X / beta) <= 1 - 1/a for every rank-r matrix
// with largest singular value sigma1. Requires a > 1.
double penalty_scale_bound(FractionParam p, int r, double sigma1);

}  // namespace lrr

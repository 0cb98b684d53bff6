#include "lrr/penalty.hpp"

#include <cmath>
#include <stdexcept>

#include "lrr/errors.hpp"

namespace lrr {

FractionParam::FractionParam(double a_) : a(a_) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("FractionParam: a must be a positive finite real");
  }
}

double rho(FractionParam p, double t) {
  const double s = p.a * std::abs(t);
  return s / (s + 1.0);
}

double penalty_from_sigma(FractionParam p, const Vector& sigma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    total += rho(p, sigma(i));
  }
  return total;
}

double penalty_value(FractionParam p, const Matrix& x) {
  return penalty_from_sigma(p, singular_values(x));
}

Matrix soft_threshold(const Matrix& y, double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument("soft_threshold: lambda must be a nonnegative real");
  }
  const detail::ThinSvd dec = detail::thin_svd(y);
  const Vector shrunk = (dec.sigma.array() - lambda / 2.0).max(0.0);
  return dec.u * shrunk.asDiagonal() * dec.v.transpose();
}

Matrix dc_subgradient(const Matrix& x, double lambda, FractionParam p) {
  const detail::ThinSvd dec = detail::thin_svd(x);
  Vector diag(dec.sigma.size());
  for (Eigen::Index i = 0; i < dec.sigma.size(); ++i) {
    if (dec.sigma(i) == 0.0) {
      // The generalized gradient at a zero singular value is a set; the zero
      // element keeps the linearization inert in vanished directions.
      diag(i) = 0.0;
    } else {
      const double denom = p.a * dec.sigma(i) + 1.0;
      diag(i) = lambda - lambda * p.a / (denom * denom);
    }
  }
  return dec.u * diag.asDiagonal() * dec.v.transpose();
}

double penalty_scale_bound(FractionParam p, int r, double sigma1) {
  if (!(p.a > 1.0)) {
    throw std::invalid_argument("penalty_scale_bound: requires a > 1");
  }
  if (r < 1) {
    throw std::invalid_argument("penalty_scale_bound: rank must be at least 1");
  }
  if (!(sigma1 > 0.0)) {
    throw std::invalid_argument("penalty_scale_bound: sigma1 must be positive");
  }
  return p.a * (p.a * r - p.a + 1.0) * sigma1 / (p.a - 1.0);
}

}  // namespace lrr

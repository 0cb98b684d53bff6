#include "lrr/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lrr/errors.hpp"
#include "lrr/penalty.hpp"

namespace lrr {

namespace {

constexpr double kRelChangeGuard = 1e-30;  // handles the all-zero iterate

double relative_change(const Matrix& next, const Matrix& prev) {
  return (next - prev).norm() / std::max(next.norm(), kRelChangeGuard);
}

double residual_norm(const AffineOperator& op, const Vector& b, const Matrix& x) {
  return (op.apply(x) - b).norm();
}

class StopWatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

LambdaPolicy LambdaPolicy::fixed(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("LambdaPolicy::fixed: lambda must be positive");
  }
  return LambdaPolicy{Kind::Fixed, lambda};
}

Matrix b_mu(const Matrix& z, const AffineOperator& op, const Vector& b, double mu,
            const Matrix& n) {
  if (z.rows() != op.rows() || z.cols() != op.cols() || n.rows() != op.rows() ||
      n.cols() != op.cols() || b.size() != op.dim()) {
    throw std::invalid_argument("b_mu: inconsistent dimensions");
  }
  return z + mu * op.adjoint(b - op.apply(z)) + 0.5 * mu * n;
}

InnerResult inner_solve(const AffineOperator& op, const Vector& b, double mu,
                        const LambdaPolicy& policy, int target_rank, const Matrix& n,
                        const Matrix& x_start, double inner_tol, int max_inner) {
  const bool adaptive = policy.kind == LambdaPolicy::Kind::Adaptive;
  if (adaptive && target_rank < 1) {
    throw std::invalid_argument("inner_solve: adaptive policy needs target_rank >= 1");
  }
  Matrix x = x_start;
  double lambda_used = adaptive ? 0.0 : policy.lambda;
  int bracket_violations = 0;
  int iterations = 0;
  while (iterations < max_inner) {
    ++iterations;
    const Matrix center = b_mu(x, op, b, mu, n);
    const detail::ThinSvd dec = detail::thin_svd(center);
    const Vector& sigma = dec.sigma;
    double lambda = policy.lambda;
    if (adaptive) {
      const double sigma_next =
          target_rank < sigma.size() ? sigma(target_rank) : 0.0;
      lambda = 2.0 * sigma_next / mu;
      if (target_rank >= 1 && target_rank < sigma.size()) {
        const double sigma_r = sigma(target_rank - 1);
        if (sigma_r > sigma_next &&
            !(lambda >= 2.0 * sigma_next / mu && lambda < 2.0 * sigma_r / mu)) {
          ++bracket_violations;
        }
      }
      lambda_used = lambda;
    }
    const Vector shrunk = (sigma.array() - lambda * mu / 2.0).max(0.0);
    Matrix x_next = dec.u * shrunk.asDiagonal() * dec.v.transpose();
    const double rel = relative_change(x_next, x);
    x = std::move(x_next);
    if (rel <= inner_tol) break;
  }
  return InnerResult{std::move(x), lambda_used, iterations, bracket_violations};
}

namespace {

double resolve_mu(const AffineOperator& op, const RtrdcConfig& config) {
  if (config.mu) {
    if (!(*config.mu > 0.0) || !std::isfinite(*config.mu)) {
      throw std::invalid_argument("rtrdc_solve: mu must be positive");
    }
    return *config.mu;
  }
  const OperatorNormEstimate norm = operator_norm(op);
  if (!(norm.value > 0.0)) {
    throw std::invalid_argument("rtrdc_solve: operator norm is zero, cannot pick mu");
  }
  // Strictly inside the contraction bound mu < 1/||A||^2.
  return 0.99 / (norm.value * norm.value);
}

SolverReport rtrdc_run(const AffineOperator& op, const Vector& b,
                       const RtrdcConfig& config, Matrix x) {
  if (b.size() != op.dim()) {
    throw std::invalid_argument("rtrdc_solve: observation length mismatch");
  }
  const FractionParam frac(config.a);
  const bool adaptive = config.lambda_policy.kind == LambdaPolicy::Kind::Adaptive;
  if (adaptive && config.target_rank < 1) {
    throw std::invalid_argument("rtrdc_solve: adaptive policy needs target_rank >= 1");
  }
  const double mu = resolve_mu(op, config);
  StopWatch watch;

  // Lambda feeding the first subgradient: the fixed value, or the adaptive
  // rule evaluated at the start point with no linearization term.
  double lambda_prev = config.lambda_policy.lambda;
  if (adaptive) {
    const Matrix center = b_mu(x, op, b, mu, Matrix::Zero(op.rows(), op.cols()));
    const Vector sigma = singular_values(center);
    lambda_prev =
        config.target_rank < sigma.size() ? 2.0 * sigma(config.target_rank) / mu : 0.0;
  }

  SolverReport report;
  for (int k = 0; k < config.max_outer; ++k) {
    const Matrix subgrad = dc_subgradient(x, lambda_prev, frac);
    InnerResult inner = inner_solve(op, b, mu, config.lambda_policy, config.target_rank,
                                    subgrad, x, config.inner_tol, config.max_inner);
    const double rel = relative_change(inner.x, x);
    x = std::move(inner.x);
    lambda_prev = inner.lambda_used;

    report.outer_iterations = k + 1;
    report.total_inner_iterations += inner.iterations;
    report.adaptive_bracket_violations += inner.bracket_violations;
    const double residual = residual_norm(op, b, x);
    report.objective_history.push_back(residual * residual +
                                       inner.lambda_used * penalty_value(frac, x));
    report.residual_history.push_back(residual);
    report.lambda_history.push_back(inner.lambda_used);
    if (rel <= config.outer_tol) {
      report.converged = true;
      break;
    }
  }
  report.solution = std::move(x);
  report.wall_time_seconds = watch.seconds();
  return report;
}

Matrix initial_point(const AffineOperator& op, const Vector& b, const RtrdcConfig& config) {
  if (config.init == InitPolicy::AdjointB) {
    return op.adjoint(b);
  }
  return Matrix::Zero(op.rows(), op.cols());
}

}  // namespace

SolverReport rtrdc_solve(const AffineOperator& op, const Vector& b,
                         const RtrdcConfig& config) {
  if (b.size() != op.dim()) {
    throw std::invalid_argument("rtrdc_solve: observation length mismatch");
  }
  return rtrdc_run(op, b, config, initial_point(op, b, config));
}

SolverReport rtrdc_solve(const AffineOperator& op, const Vector& b,
                         const RtrdcConfig& config, const Matrix& x_start) {
  if (x_start.rows() != op.rows() || x_start.cols() != op.cols()) {
    throw std::invalid_argument("rtrdc_solve: warm start shape mismatch");
  }
  return rtrdc_run(op, b, config, x_start);
}

SolverReport svt_solve(const AffineOperator& op, const Vector& b,
                       std::optional<double> tau, double step, double tol,
                       int max_iters) {
  if (op.kind() != AffineOperator::Kind::Mask) {
    throw std::invalid_argument("svt_solve: only mask operators are supported");
  }
  if (b.size() != op.dim()) {
    throw std::invalid_argument("svt_solve: observation length mismatch");
  }
  const double m = op.rows(), n = op.cols();
  const double tau_value = tau ? *tau : 5.0 * std::sqrt(m * n);
  if (!(tau_value > 0.0)) {
    throw std::invalid_argument("svt_solve: tau must be positive");
  }
  const double delta = step > 0.0 ? step : 1.2 * m * n / static_cast<double>(op.dim());
  const double b_norm = std::max(b.norm(), kRelChangeGuard);
  StopWatch watch;

  SolverReport report;
  Matrix dual = Matrix::Zero(op.rows(), op.cols());
  Matrix x;
  for (int k = 0; k < max_iters; ++k) {
    x = soft_threshold(dual, 2.0 * tau_value);  // shrinks singular values by tau
    const Vector residual_vec = b - op.apply(x);
    const double residual = residual_vec.norm();
    report.outer_iterations = k + 1;
    report.objective_history.push_back(residual * residual);
    report.residual_history.push_back(residual);
    report.lambda_history.push_back(tau_value);
    if (residual / b_norm <= tol) {
      report.converged = true;
      break;
    }
    dual.noalias() += delta * op.adjoint(residual_vec);
  }
  report.solution = std::move(x);
  report.wall_time_seconds = watch.seconds();
  return report;
}

SolverReport svp_solve(const AffineOperator& op, const Vector& b, int r, double step,
                       double tol, int max_iters) {
  if (r < 1 || r > std::min(op.rows(), op.cols())) {
    throw std::invalid_argument("svp_solve: rank out of range");
  }
  if (b.size() != op.dim()) {
    throw std::invalid_argument("svp_solve: observation length mismatch");
  }
  StopWatch watch;
  SolverReport report;
  Matrix x = Matrix::Zero(op.rows(), op.cols());
  for (int k = 0; k < max_iters; ++k) {
    const Vector residual_vec = op.apply(x) - b;
    Matrix x_next = truncate_rank(x - step * op.adjoint(residual_vec), r);
    const double rel = relative_change(x_next, x);
    x = std::move(x_next);
    const double residual = residual_norm(op, b, x);
    report.outer_iterations = k + 1;
    report.objective_history.push_back(residual * residual);
    report.residual_history.push_back(residual);
    report.lambda_history.push_back(0.0);
    if (rel <= tol) {
      report.converged = true;
      break;
    }
  }
  report.solution = std::move(x);
  report.wall_time_seconds = watch.seconds();
  return report;
}

void write_report(const SolverReport& report, const std::string& algorithm,
                  std::optional<double> re, std::ostream& out) {
  char buf[64];
  out << "algorithm,re,outer_iterations,seconds\n";
  out << algorithm << ',';
  if (re) {
    std::snprintf(buf, sizeof(buf), "%.2e", *re);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.3f", report.wall_time_seconds);
  out << ',' << report.outer_iterations << ',' << buf << '\n';
  out << "iteration,objective,residual,lambda\n";
  for (int k = 0; k < report.outer_iterations; ++k) {
    std::snprintf(buf, sizeof(buf), "%.12e", report.objective_history[k]);
    out << (k + 1) << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.12e", report.residual_history[k]);
    out << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.12e", report.lambda_history[k]);
    out << ',' << buf << '\n';
  }
}

void write_report_file(const SolverReport& report, const std::string& algorithm,
                       std::optional<double> re, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("write_report_file: cannot open " + path);
  }
  write_report(report, algorithm, re, out);
  if (!out) {
    throw IoError("write_report_file: write failed on " + path);
  }
}

}  // namespace lrr

#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lrr/affine_operator.hpp"
#include "lrr/numerics.hpp"

namespace lrr {

struct LambdaPolicy {
  enum class Kind { Fixed, Adaptive };

  Kind kind = Kind::Adaptive;
  double lambda = 0.0;  // Fixed only

  static LambdaPolicy fixed(double lambda);
  static LambdaPolicy adaptive() { return LambdaPolicy{}; }
};

enum class InitPolicy { Zero, AdjointB };

struct RtrdcConfig {
  double a = 1.2;
  std::optional<double> mu;  // empty resolves to 0.99 / ||A||_2^2 at solve time
  int target_rank = 0;       // Adaptive policy only; callers must set it
  LambdaPolicy lambda_policy = LambdaPolicy::adaptive();
  double outer_tol = 1e-8;
  double inner_tol = 1e-8;
  int max_outer = 50;
  int max_inner = 500;
  InitPolicy init = InitPolicy::Zero;
};

struct SolverReport {
  Matrix solution;
  int outer_iterations = 0;
  long total_inner_iterations = 0;
  std::vector<double> objective_history;  // one entry per outer iteration
  std::vector<double> residual_history;
  std::vector<double> lambda_history;
  bool converged = false;
  double wall_time_seconds = 0.0;
  // Number of inner steps where sigma_r > sigma_{r+1} held but the adaptive
  // lambda fell outside [2*sigma_{r+1}/mu, 2*sigma_r/mu). Zero on a sound run.
  int adaptive_bracket_violations = 0;
};

// Surrogate center Z + mu*A*(b - A(Z)) + (mu/2)*N.
Matrix b_mu(const Matrix& z, const AffineOperator& op, const Vector& b, double mu,
            const Matrix& n);

struct InnerResult {
  Matrix x;
  double lambda_used = 0.0;
  int iterations = 0;
  int bracket_violations = 0;
};

// Thresholding fixed point X <- D_{lambda*mu}(B_mu(X)) for the convex
// subproblem min ||A(X)-b||^2 + lambda*||X||_* - <X, N>. Under the adaptive
// policy lambda is recomputed each step as 2*sigma_{r+1}(B_mu(X))/mu, which
// caps the iterate rank at target_rank. Non-convergence is reported through
// iterations == max_inner, not an error.
InnerResult inner_solve(const AffineOperator& op, const Vector& b, double mu,
                        const LambdaPolicy& policy, int target_rank, const Matrix& n,
                        const Matrix& x_start, double inner_tol, int max_inner);

// Outer loop: subgradient step N^k, then an inner solve started from X^k.
// Stops on relative iterate change <= outer_tol or max_outer.
SolverReport rtrdc_solve(const AffineOperator& op, const Vector& b,
                         const RtrdcConfig& config);
// Same, warm-started from x_start instead of config.init.
SolverReport rtrdc_solve(const AffineOperator& op, const Vector& b,
                         const RtrdcConfig& config, const Matrix& x_start);

// Singular value thresholding baseline (mask operators only).
//   X^k = soft_threshold(Y^{k-1}, 2*tau);  Y^k = Y^{k-1} + step*A*(b - A(X^k))
// tau empty = 5*sqrt(m*n); step <= 0 resolves to 1.2 * m*n/s.
SolverReport svt_solve(const AffineOperator& op, const Vector& b,
                       std::optional<double> tau = std::nullopt, double step = 0.0,
                       double tol = 1e-8, int max_iters = 500);

// Projected gradient onto the rank-r set.
SolverReport svp_solve(const AffineOperator& op, const Vector& b, int r,
                       double step = 1.0, double tol = 1e-8, int max_iters = 500);

// Summary line (algorithm, re, iterations, seconds) followed by a CSV block
// (iteration, objective, residual, lambda).
void write_report(const SolverReport& report, const std::string& algorithm,
                  std::optional<double> re, std::ostream& out);
void write_report_file(const SolverReport& report, const std::string& algorithm,
                       std::optional<double> re, const std::string& path);

}  // namespace lrr

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lrr/affine_operator.hpp"
#include "lrr/numerics.hpp"
#include "lrr/penalty.hpp"
#include "lrr/solver.hpp"

namespace lrr {

// Spectral split of R: r0 carries the 2T largest singular triples, the blocks
// carry K consecutive triples each (last one possibly smaller), rc is their
// sum. Blocks are pairwise orthogonal in both row and column space.
struct PartitionResult {
  Matrix r0;
  Matrix rc;
  std::vector<Matrix> blocks;
  int t = 0;
  int k = 0;
};

PartitionResult partition(const Matrix& r, int t, int k);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Additivity of the penalty over matrices with orthogonal row and column
// spaces: P_a(M+N) vs P_a(M) + P_a(N). Errors if the orthogonality
// precondition fails, naming the offending product.
InequalityCheck check_penalty_additivity(const Matrix& m, const Matrix& n, FractionParam p);

// ||R0 + R1||_F >= P_a(R0) / (a*sqrt(2T)).
InequalityCheck check_head_block_bound(const Matrix& r, int t, int k, FractionParam p);

struct ChainCheck {
  // { sum_{i>=2} ||R_i/gamma||_F,  sum_{i>=2} P_a(R_{i-1}/gamma)/sqrt(K),
  //   P_a(R0/gamma)/sqrt(K) }
  std::array<double, 3> chain{};
  bool holds = false;
};

// Two-link chain over the partition blocks at scale 1/gamma. Preconditions:
// a > 1, gamma above the penalty_scale_bound bound for rc, and the additivity surrogate
// P_a(rc/gamma) <= P_a(r0/gamma) that the second link consumes.
ChainCheck check_block_chain(const Matrix& r, int t, int k, FractionParam p, double gamma);

struct RicEstimate {
  int r = 0;
  // Sampled lower bound on the restricted isometry constant at rank r.
  // Sampling can only certify violations, never the constant itself, so this
  // is a lower bound and nothing more.
  double delta_lower = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

// Max distortion | ||A(X)||^2 - 1 | over unit-Frobenius rank-<=r samples:
// Gaussian-factor products plus the canonical single-entry matrices as
// designed adversaries. Sample sets nest across r for a fixed seed, so the
// estimate is monotone in r.
RicEstimate ric_estimate(const AffineOperator& op, int r, int trials,
                         std::uint64_t seed);

// Root of f(a) = (K/(2T a^2))(1 - delta_2tk) - 1 - delta_k, in closed form:
// sqrt(K (1 - delta_2tk) / (2T (1 + delta_k))). Requires K > 2T and the
// strict recovery condition f(1) > 0; the result always exceeds 1.
double a_star(int t, int k, double delta_k, double delta_2tk);

// (3 - 2a^2) / (3 + 2a^2) for a > 1. A positive value is a certification
// threshold on delta_{5T}; a negative value certifies nothing at this a.
double isometry_certification_bound(FractionParam p);

struct LambdaPathPoint {
  double lambda = 0.0;
  Matrix solution;
  double penalty = 0.0;
  double residual = 0.0;
};

// Fixed-lambda solves along a strictly decreasing lambda sequence, each run
// warm-started from the previous solution. Residuals tend to zero as lambda
// does whenever the constraint set is feasible.
std::vector<LambdaPathPoint> lambda_path_experiment(const AffineOperator& op,
                                                    const Vector& b, FractionParam p,
                                                    const std::vector<double>& lambdas,
                                                    const RtrdcConfig& base_config);

}  // namespace lrr

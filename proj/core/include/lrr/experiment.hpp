#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrr/affine_operator.hpp"
#include "lrr/numerics.hpp"
#include "lrr/solver.hpp"

namespace lrr {

// One inpainting/completion problem: clean low-rank ground truth in [0, 1],
// a sampling mask, and the observed vector (possibly from a noisy copy).
struct InpaintingInstance {
  Matrix ground_truth;
  AffineOperator mask;
  Vector observed;
  bool noisy = false;
  std::uint64_t mask_seed = 0;
  std::optional<std::uint64_t> noise_seed;
  double sr = 0.0;  // |Omega| / (m*n), exact
  double fr = 0.0;  // |Omega| / (r*(m+n-r)), exact
  int rank_r = 0;
  // fr < 1: the observations cannot determine a rank-r matrix.
  bool underdetermined = false;
};

enum class Algorithm { Rtrdc, Svt, Svp };

std::string algorithm_name(Algorithm a);

struct ExperimentRow {
  std::string image_name;
  Algorithm algorithm = Algorithm::Rtrdc;
  double sr = 0.0;
  double fr = 0.0;
  int rank_r = 0;
  bool noisy = false;
  double re = 0.0;
  long iterations = 0;
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

// X + N(0, variance) noise on the [0, 1] gray scale, clamped back to [0, 1].
Matrix add_gaussian_noise(const Matrix& x, double variance, std::uint64_t seed);

// ||X - M||_F / ||M||_F; M must be nonzero.
double relative_error(const Matrix& x, const Matrix& m);

// Ground truth = rank-r truncation of m_full clamped to [0, 1]; mask of
// round(sr*m*n) cells from mask_seed; observations from the noisy copy when
// noisy is set. Deterministic in all arguments.
InpaintingInstance make_instance(const Matrix& m_full, int r, double sr, bool noisy,
                                 std::uint64_t mask_seed, std::uint64_t noise_seed,
                                 double noise_variance = 0.01);

struct ComparisonConfig {
  RtrdcConfig rtrdc;                  // target_rank <= 0 picks the instance rank
  std::optional<double> svt_tau;      // empty = 5*sqrt(m*n)
  double svt_step = 0.0;              // <= 0 = 1.2 * m*n/s
  double svp_step = 1.0;
  double baseline_tol = 1e-8;
  int baseline_max_iters = 500;
};

// Runs the requested solvers on one instance. RE is always measured against
// the clean ground truth, also in the noisy case.
std::vector<ExperimentRow> run_comparison(const InpaintingInstance& instance,
                                          const std::vector<Algorithm>& algorithms,
                                          const ComparisonConfig& config,
                                          const std::string& image_name);

// Access to the per-run reports (recovered matrices included), same order as
// run_comparison's rows.
struct ComparisonOutcome {
  std::vector<ExperimentRow> rows;
  std::vector<SolverReport> reports;
};
ComparisonOutcome run_comparison_full(const InpaintingInstance& instance,
                                      const std::vector<Algorithm>& algorithms,
                                      const ComparisonConfig& config,
                                      const std::string& image_name);

// CSV with header image,algorithm,sr,fr,rank,noisy,re,iterations,seconds,seed;
// re in scientific notation with 3 significant digits.
void emit_table(const std::vector<ExperimentRow>& rows, const std::string& path);
std::vector<ExperimentRow> parse_table(const std::string& path);

// "7.35e-02" style: three significant digits.
std::string format_scientific(double v);

}  // namespace lrr

#include "lrr/theory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lrr/errors.hpp"
#include "lrr/rng.hpp"

namespace lrr {

namespace {

Matrix triples(const SvdFactors& f, int begin, int end) {
  const int count = end - begin;
  return f.u.middleCols(begin, count) *
         f.sigma.segment(begin, count).asDiagonal() *
         f.v.middleCols(begin, count).transpose();
}

}  // namespace

PartitionResult partition(const Matrix& r, int t, int k) {
  const int mn = static_cast<int>(std::min(r.rows(), r.cols()));
  if (t < 1) {
    throw std::invalid_argument("partition: T must be at least 1");
  }
  if (2 * t >= mn) {
    throw std::invalid_argument("partition: requires 2T < min(rows, cols)");
  }
  if (k < 1) {
    throw std::invalid_argument("partition: K must be at least 1");
  }
  const SvdFactors f = svd(r);
  const double cutoff = f.sigma(0) * std::max(r.rows(), r.cols()) * 1e-12;

  PartitionResult result;
  result.t = t;
  result.k = k;
  result.r0 = triples(f, 0, 2 * t);
  result.rc = Matrix::Zero(r.rows(), r.cols());
  for (int begin = 2 * t; begin < mn; begin += k) {
    const int end = std::min(begin + k, mn);
    // Values are sorted, so once a group is all below the cutoff every later
    // group is too.
    if (f.sigma(begin) <= cutoff) break;
    Matrix block = triples(f, begin, end);
    result.rc += block;
    result.blocks.push_back(std::move(block));
  }
  return result;
}

InequalityCheck check_penalty_additivity(const Matrix& m, const Matrix& n, FractionParam p) {
  if (m.rows() != n.rows() || m.cols() != n.cols()) {
    throw std::invalid_argument("check_penalty_additivity: dimension mismatch");
  }
  const double scale = std::max(1.0, m.norm() * n.norm());
  const double row_product = (m * n.transpose()).norm();
  const double col_product = (m.transpose() * n).norm();
  if (row_product > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "check_penalty_additivity: M*N^T is nonzero (||.||_F = " << row_product << ")";
    throw std::invalid_argument(msg.str());
  }
  if (col_product > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "check_penalty_additivity: M^T*N is nonzero (||.||_F = " << col_product << ")";
    throw std::invalid_argument(msg.str());
  }
  InequalityCheck check;
  const Matrix sum = m + n;
  check.lhs = penalty_value(p, sum);
  check.rhs = penalty_value(p, m) + penalty_value(p, n);
  check.holds = std::abs(check.lhs - check.rhs) <= 1e-8 * (1.0 + check.rhs);
  return check;
}

InequalityCheck check_head_block_bound(const Matrix& r, int t, int k, FractionParam p) {
  const PartitionResult parts = partition(r, t, k);
  InequalityCheck check;
  const Matrix r1 = parts.blocks.empty()
                        ? Matrix::Zero(r.rows(), r.cols()).eval()
                        : parts.blocks.front();
  check.lhs = (parts.r0 + r1).norm();
  check.rhs = penalty_value(p, parts.r0) / (p.a * std::sqrt(2.0 * t));
  check.holds = check.lhs >= check.rhs - 1e-10;
  return check;
}

ChainCheck check_block_chain(const Matrix& r, int t, int k, FractionParam p, double gamma) {
  if (!(p.a > 1.0)) {
    throw std::invalid_argument("check_block_chain: requires a > 1");
  }
  const PartitionResult parts = partition(r, t, k);
  ChainCheck check;

  const double inv_gamma = 1.0 / gamma;
  const Matrix r0_scaled = inv_gamma * parts.r0;
  const double penalty_r0 = penalty_value(p, r0_scaled);
  check.chain = {0.0, 0.0, penalty_r0 / std::sqrt(static_cast<double>(k))};

  if (!parts.blocks.empty()) {
    const Vector rc_sigma = singular_values(parts.rc);
    const int rc_rank = numerical_rank(rc_sigma, static_cast<int>(r.rows()),
                                       static_cast<int>(r.cols()));
    if (rc_rank > 0) {
      const double gamma_bound = penalty_scale_bound(p, rc_rank, rc_sigma(0));
      if (!(gamma > gamma_bound)) {
        std::ostringstream msg;
        msg << "check_block_chain: gamma must exceed " << gamma_bound;
        throw std::invalid_argument(msg.str());
      }
    }
    // The second link rests on the additivity surrogate at the 1/gamma scale;
    // an arbitrary R need not satisfy it, so it is a precondition here.
    const Matrix rc_scaled = inv_gamma * parts.rc;
    const double penalty_rc = penalty_value(p, rc_scaled);
    if (penalty_rc > penalty_r0 + 1e-12 * (1.0 + penalty_r0)) {
      std::ostringstream msg;
      msg << "check_block_chain: surrogate precondition P_a(Rc/gamma) <= P_a(R0/gamma) "
             "violated ("
          << penalty_rc << " > " << penalty_r0 << ")";
      throw std::invalid_argument(msg.str());
    }
    const double sqrt_k = std::sqrt(static_cast<double>(k));
    for (std::size_t i = 1; i < parts.blocks.size(); ++i) {
      const Matrix prev_scaled = inv_gamma * parts.blocks[i - 1];
      check.chain[0] += inv_gamma * parts.blocks[i].norm();
      check.chain[1] += penalty_value(p, prev_scaled) / sqrt_k;
    }
  }
  check.holds = check.chain[0] <= check.chain[1] + 1e-10 &&
                check.chain[1] <= check.chain[2] + 1e-10;
  return check;
}

namespace {

double distortion(const AffineOperator& op, const Matrix& x) {
  const double fro2 = x.squaredNorm();
  return std::abs(op.apply(x).squaredNorm() / fro2 - 1.0);
}

// Worst distortion over the m*n canonical single-entry matrices, computed in
// closed form. Masks see exactly 0 or 1 per cell; general operators see the
// per-cell sum of squared component entries.
double designed_single_entry_worst(const AffineOperator& op) {
  if (op.kind() == AffineOperator::Kind::Mask) {
    const long total = static_cast<long>(op.rows()) * op.cols();
    return op.dim() < total ? 1.0 : 0.0;
  }
  double worst = 0.0;
  Matrix cellwise = Matrix::Zero(op.rows(), op.cols());
  for (const Matrix& a : op.components()) {
    cellwise.array() += a.array().square();
  }
  for (int i = 0; i < op.rows(); ++i) {
    for (int j = 0; j < op.cols(); ++j) {
      worst = std::max(worst, std::abs(cellwise(i, j) - 1.0));
    }
  }
  return worst;
}

}  // namespace

RicEstimate ric_estimate(const AffineOperator& op, int r, int trials,
                         std::uint64_t seed) {
  const int mn = std::min(op.rows(), op.cols());
  if (r < 1 || r > mn) {
    throw std::invalid_argument("ric_estimate: rank out of range");
  }
  if (trials < 1) {
    throw std::invalid_argument("ric_estimate: trials must be at least 1");
  }
  double worst = designed_single_entry_worst(op);
  const Rng root(seed);
  for (int trial = 0; trial < trials; ++trial) {
    Rng stream = root.substream(static_cast<std::uint64_t>(trial));
    Matrix x = Matrix::Zero(op.rows(), op.cols());
    // Columns are drawn in a fixed order, so the rank-q sample of each trial
    // coincides across calls with different r; sample sets nest in r.
    for (int q = 0; q < r; ++q) {
      Vector left(op.rows()), right(op.cols());
      for (int i = 0; i < op.rows(); ++i) left(i) = stream.next_gaussian();
      for (int j = 0; j < op.cols(); ++j) right(j) = stream.next_gaussian();
      x.noalias() += left * right.transpose();
      worst = std::max(worst, distortion(op, x));
    }
  }
  return RicEstimate{r, worst, trials, seed};
}

double a_star(int t, int k, double delta_k, double delta_2tk) {
  if (t < 1) {
    throw std::invalid_argument("a_star: T must be at least 1");
  }
  if (k <= 2 * t) {
    throw std::invalid_argument("a_star: requires K > 2T");
  }
  if (delta_k < 0.0 || delta_k >= 1.0 || delta_2tk < 0.0 || delta_2tk >= 1.0) {
    throw std::invalid_argument("a_star: isometry constants must lie in [0, 1)");
  }
  const double ratio = static_cast<double>(k) / (2.0 * t);
  if (!(ratio * (1.0 - delta_2tk) - (1.0 + delta_k) > 0.0)) {
    throw std::invalid_argument("a_star: recovery condition not satisfied");
  }
  return std::sqrt(k * (1.0 - delta_2tk) / (2.0 * t * (1.0 + delta_k)));
}

double isometry_certification_bound(FractionParam p) {
  if (!(p.a > 1.0)) {
    throw std::invalid_argument("isometry_certification_bound: requires a > 1");
  }
  const double a2 = p.a * p.a;
  return (3.0 - 2.0 * a2) / (3.0 + 2.0 * a2);
}

std::vector<LambdaPathPoint> lambda_path_experiment(const AffineOperator& op,
                                                    const Vector& b, FractionParam p,
                                                    const std::vector<double>& lambdas,
                                                    const RtrdcConfig& base_config) {
  if (lambdas.empty()) {
    throw std::invalid_argument("lambda_path_experiment: empty lambda sequence");
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) {
      throw std::invalid_argument("lambda_path_experiment: lambdas must be positive");
    }
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) {
      throw std::invalid_argument(
          "lambda_path_experiment: lambdas must be strictly decreasing");
    }
  }
  std::vector<LambdaPathPoint> path;
  path.reserve(lambdas.size());
  Matrix warm = Matrix::Zero(op.rows(), op.cols());
  bool have_warm = false;
  for (double lambda : lambdas) {
    RtrdcConfig config = base_config;
    config.a = p.a;
    config.lambda_policy = LambdaPolicy::fixed(lambda);
    const SolverReport report = have_warm ? rtrdc_solve(op, b, config, warm)
                                          : rtrdc_solve(op, b, config);
    warm = report.solution;
    have_warm = true;
    LambdaPathPoint point;
    point.lambda = lambda;
    point.penalty = penalty_value(p, report.solution);
    point.residual = (op.apply(report.solution) - b).norm();
    point.solution = report.solution;
    path.push_back(std::move(point));
  }
  return path;
}

}  // namespace lrr

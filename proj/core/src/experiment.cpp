#include "lrr/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lrr/errors.hpp"
#include "lrr/rng.hpp"

namespace lrr {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Rtrdc: return "RTrDC";
    case Algorithm::Svt: return "SVT";
    case Algorithm::Svp: return "SVP";
  }
  throw std::logic_error("algorithm_name: unknown algorithm");
}

namespace {

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "RTrDC") return Algorithm::Rtrdc;
  if (name == "SVT") return Algorithm::Svt;
  if (name == "SVP") return Algorithm::Svp;
  throw IoError("unknown algorithm name: " + name);
}

Matrix clamp01(Matrix x) {
  return x.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace

Matrix add_gaussian_noise(const Matrix& x, double variance, std::uint64_t seed) {
  if (variance < 0.0 || !std::isfinite(variance)) {
    throw std::invalid_argument("add_gaussian_noise: variance must be nonnegative");
  }
  if (variance == 0.0) return x;
  const double stddev = std::sqrt(variance);
  Rng rng(seed);
  Matrix noisy(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      noisy(i, j) = x(i, j) + stddev * rng.next_gaussian();
    }
  }
  return clamp01(std::move(noisy));
}

double relative_error(const Matrix& x, const Matrix& m) {
  if (x.rows() != m.rows() || x.cols() != m.cols()) {
    throw std::invalid_argument("relative_error: dimension mismatch");
  }
  const double denom = m.norm();
  if (denom == 0.0) {
    throw std::invalid_argument("relative_error: reference matrix is zero");
  }
  return (x - m).norm() / denom;
}

InpaintingInstance make_instance(const Matrix& m_full, int r, double sr, bool noisy,
                                 std::uint64_t mask_seed, std::uint64_t noise_seed,
                                 double noise_variance) {
  if (!(sr > 0.0) || sr > 1.0) {
    throw std::invalid_argument("make_instance: sr must be in (0, 1]");
  }
  const long rows = m_full.rows(), cols = m_full.cols();
  const long total = rows * cols;
  const long s = std::lround(sr * static_cast<double>(total));
  if (s < 1 || s > total) {
    throw std::invalid_argument("make_instance: sample count out of range");
  }
  // Truncation can push gray levels outside [0, 1]; clamp to keep pixels
  // displayable.
  Matrix truth = clamp01(truncate_rank(m_full, r));
  AffineOperator mask = sample_mask(static_cast<int>(rows), static_cast<int>(cols),
                                    static_cast<int>(s), mask_seed);
  Vector observed =
      noisy ? mask.apply(add_gaussian_noise(truth, noise_variance, noise_seed))
            : mask.apply(truth);
  const double sr_exact = static_cast<double>(s) / static_cast<double>(total);
  const double fr = static_cast<double>(s) /
                    (static_cast<double>(r) * static_cast<double>(rows + cols - r));
  return InpaintingInstance{std::move(truth),
                            std::move(mask),
                            std::move(observed),
                            noisy,
                            mask_seed,
                            noisy ? std::optional<std::uint64_t>(noise_seed)
                                  : std::nullopt,
                            sr_exact,
                            fr,
                            r,
                            fr < 1.0};
}

ComparisonOutcome run_comparison_full(const InpaintingInstance& instance,
                                      const std::vector<Algorithm>& algorithms,
                                      const ComparisonConfig& config,
                                      const std::string& image_name) {
  ComparisonOutcome outcome;
  for (Algorithm algo : algorithms) {
    SolverReport report;
    switch (algo) {
      case Algorithm::Rtrdc: {
        RtrdcConfig rc = config.rtrdc;
        if (rc.target_rank <= 0) rc.target_rank = instance.rank_r;
        report = rtrdc_solve(instance.mask, instance.observed, rc);
        break;
      }
      case Algorithm::Svt:
        report = svt_solve(instance.mask, instance.observed, config.svt_tau,
                           config.svt_step, config.baseline_tol,
                           config.baseline_max_iters);
        break;
      case Algorithm::Svp:
        report = svp_solve(instance.mask, instance.observed, instance.rank_r,
                           config.svp_step, config.baseline_tol,
                           config.baseline_max_iters);
        break;
    }
    ExperimentRow row;
    row.image_name = image_name;
    row.algorithm = algo;
    row.sr = instance.sr;
    row.fr = instance.fr;
    row.rank_r = instance.rank_r;
    row.noisy = instance.noisy;
    // Accuracy is always judged against the clean low-rank truth, noisy
    // observations included.
    row.re = relative_error(report.solution, instance.ground_truth);
    row.iterations = report.outer_iterations;
    row.seconds = report.wall_time_seconds;
    row.seed = instance.mask_seed;
    outcome.rows.push_back(std::move(row));
    outcome.reports.push_back(std::move(report));
  }
  return outcome;
}

std::vector<ExperimentRow> run_comparison(const InpaintingInstance& instance,
                                          const std::vector<Algorithm>& algorithms,
                                          const ComparisonConfig& config,
                                          const std::string& image_name) {
  return run_comparison_full(instance, algorithms, config, image_name).rows;
}

std::string format_scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

namespace {

std::string format_general(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string format_fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void emit_table(const std::vector<ExperimentRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("emit_table: cannot open " + path);
  }
  out << "image,algorithm,sr,fr,rank,noisy,re,iterations,seconds,seed\n";
  for (const ExperimentRow& row : rows) {
    out << row.image_name << ',' << algorithm_name(row.algorithm) << ','
        << format_general(row.sr) << ',' << format_general(row.fr) << ','
        << row.rank_r << ',' << (row.noisy ? 1 : 0) << ','
        << format_scientific(row.re) << ',' << row.iterations << ','
        << format_fixed3(row.seconds) << ',' << row.seed << '\n';
  }
  if (!out) {
    throw IoError("emit_table: write failed on " + path);
  }
}

std::vector<ExperimentRow> parse_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("parse_table: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("parse_table: empty file " + path);
  }
  if (line != "image,algorithm,sr,fr,rank,noisy,re,iterations,seconds,seed") {
    throw IoError("parse_table: unexpected header in " + path);
  }
  std::vector<ExperimentRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    std::vector<std::string> parts;
    while (std::getline(fields, field, ',')) parts.push_back(field);
    if (parts.size() != 10) {
      throw IoError("parse_table: malformed row '" + line + "' in " + path);
    }
    ExperimentRow row;
    row.image_name = parts[0];
    row.algorithm = algorithm_from_name(parts[1]);
    row.sr = std::stod(parts[2]);
    row.fr = std::stod(parts[3]);
    row.rank_r = std::stoi(parts[4]);
    row.noisy = parts[5] == "1";
    row.re = std::stod(parts[6]);
    row.iterations = std::stol(parts[7]);
    row.seconds = std::stod(parts[8]);
    row.seed = std::stoull(parts[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lrr

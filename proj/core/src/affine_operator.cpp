#include "lrr/affine_operator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lrr/errors.hpp"
#include "lrr/rng.hpp"

namespace lrr {

AffineOperator AffineOperator::general(std::vector<Matrix> components) {
  if (components.empty()) {
    throw std::invalid_argument("AffineOperator::general: needs at least one component");
  }
  const auto rows = components.front().rows();
  const auto cols = components.front().cols();
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("AffineOperator::general: empty component matrix");
  }
  for (const Matrix& a : components) {
    if (a.rows() != rows || a.cols() != cols) {
      throw std::invalid_argument("AffineOperator::general: components differ in shape");
    }
  }
  AffineOperator op;
  op.kind_ = Kind::General;
  op.rows_ = static_cast<int>(rows);
  op.cols_ = static_cast<int>(cols);
  op.dim_ = static_cast<int>(components.size());
  op.components_ = std::move(components);
  return op;
}

AffineOperator AffineOperator::mask(int rows, int cols, std::vector<MaskCell> cells) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("AffineOperator::mask: rows and cols must be positive");
  }
  if (cells.empty()) {
    throw std::invalid_argument("AffineOperator::mask: empty index set");
  }
  for (const MaskCell& c : cells) {
    if (c.row < 0 || c.row >= rows || c.col < 0 || c.col >= cols) {
      throw std::invalid_argument("AffineOperator::mask: cell out of range");
    }
  }
  std::sort(cells.begin(), cells.end(), [](const MaskCell& a, const MaskCell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  if (std::adjacent_find(cells.begin(), cells.end()) != cells.end()) {
    throw std::invalid_argument("AffineOperator::mask: duplicate cell");
  }
  AffineOperator op;
  op.kind_ = Kind::Mask;
  op.rows_ = rows;
  op.cols_ = cols;
  op.dim_ = static_cast<int>(cells.size());
  op.cells_ = std::move(cells);
  return op;
}

const std::vector<Matrix>& AffineOperator::components() const {
  if (kind_ != Kind::General) {
    throw std::logic_error("AffineOperator::components: not a general operator");
  }
  return components_;
}

const std::vector<MaskCell>& AffineOperator::cells() const {
  if (kind_ != Kind::Mask) {
    throw std::logic_error("AffineOperator::cells: not a mask operator");
  }
  return cells_;
}

Vector AffineOperator::apply(const Matrix& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    throw std::invalid_argument("AffineOperator::apply: matrix shape mismatch");
  }
  Vector y(dim_);
  if (kind_ == Kind::Mask) {
    for (int k = 0; k < dim_; ++k) {
      y(k) = x(cells_[k].row, cells_[k].col);
    }
  } else {
    for (int k = 0; k < dim_; ++k) {
      y(k) = components_[k].cwiseProduct(x).sum();
    }
  }
  return y;
}

Matrix AffineOperator::adjoint(const Vector& y) const {
  if (y.size() != dim_) {
    throw std::invalid_argument("AffineOperator::adjoint: vector length mismatch");
  }
  Matrix x = Matrix::Zero(rows_, cols_);
  if (kind_ == Kind::Mask) {
    for (int k = 0; k < dim_; ++k) {
      x(cells_[k].row, cells_[k].col) = y(k);
    }
  } else {
    for (int k = 0; k < dim_; ++k) {
      x.noalias() += y(k) * components_[k];
    }
  }
  return x;
}

OperatorNormEstimate operator_norm(const AffineOperator& op, int max_iters, double tol) {
  if (op.kind() == AffineOperator::Kind::Mask) {
    // Coordinate projection: spectral norm exactly 1.
    return OperatorNormEstimate{1.0, 0, true};
  }
  // Power iteration on X -> A*(A(X)) from a fixed generic start.
  Rng rng(0x5bd1e995u);
  Matrix x(op.rows(), op.cols());
  for (int i = 0; i < op.rows(); ++i) {
    for (int j = 0; j < op.cols(); ++j) {
      x(i, j) = rng.next_gaussian();
    }
  }
  x /= x.norm();
  double estimate = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Matrix y = op.adjoint(op.apply(x));
    const double rayleigh = x.cwiseProduct(y).sum();  // = ||A(x)||^2, x unit
    const double next = std::sqrt(std::max(rayleigh, 0.0));
    const double ynorm = y.norm();
    if (ynorm == 0.0) {
      return OperatorNormEstimate{0.0, it, true};
    }
    x = y / ynorm;
    if (std::abs(next - estimate) <= tol * std::max(next, 1.0)) {
      return OperatorNormEstimate{next, it, true};
    }
    estimate = next;
  }
  return OperatorNormEstimate{estimate, max_iters, false};
}

AffineOperator sample_mask(int rows, int cols, int count, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("sample_mask: rows and cols must be positive");
  }
  const long total = static_cast<long>(rows) * cols;
  if (count < 1 || count > total) {
    throw std::invalid_argument("sample_mask: count must be in [1, rows*cols]");
  }
  // Partial Fisher-Yates: exact uniform s-subset, deterministic runtime.
  std::vector<int> cells(total);
  std::iota(cells.begin(), cells.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<long>(rng.next_below(static_cast<std::uint64_t>(total - i)));
    std::swap(cells[i], cells[j]);
  }
  cells.resize(count);
  std::sort(cells.begin(), cells.end());  // linear index order = row-major
  std::vector<MaskCell> mask_cells(count);
  for (int k = 0; k < count; ++k) {
    mask_cells[k] = MaskCell{cells[k] / cols, cells[k] % cols};
  }
  return AffineOperator::mask(rows, cols, std::move(mask_cells));
}

void save_mask(const AffineOperator& op, const std::string& path) {
  if (op.kind() != AffineOperator::Kind::Mask) {
    throw std::invalid_argument("save_mask: not a mask operator");
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("save_mask: cannot open " + path);
  }
  out << op.rows() << ' ' << op.cols() << ' ' << op.dim() << '\n';
  for (const MaskCell& c : op.cells()) {
    out << c.row << ' ' << c.col << '\n';
  }
  if (!out) {
    throw IoError("save_mask: write failed on " + path);
  }
}

AffineOperator load_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("load_mask: cannot open " + path);
  }
  int rows = 0, cols = 0, count = 0;
  if (!(in >> rows >> cols >> count)) {
    throw IoError("load_mask: malformed header in " + path);
  }
  if (rows < 1 || cols < 1 || count < 1) {
    throw IoError("load_mask: non-positive dimensions in " + path);
  }
  std::vector<MaskCell> cells(count);
  for (int k = 0; k < count; ++k) {
    if (!(in >> cells[k].row >> cells[k].col)) {
      std::ostringstream msg;
      msg << "load_mask: truncated at cell " << k << " of " << count << " in " << path;
      throw IoError(msg.str());
    }
  }
  try {
    return AffineOperator::mask(rows, cols, std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw IoError("load_mask: " + std::string(e.what()) + " in " + path);
  }
}

}  // namespace lrr

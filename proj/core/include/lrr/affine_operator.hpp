#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lrr/numerics.hpp"

namespace lrr {

struct MaskCell {
  int row;
  int col;

  friend bool operator==(const MaskCell&, const MaskCell&) = default;
};

// Linear measurement map from m x n matrices to R^d. Two shapes:
//   General - d dense matrices A_k, component k of the image is <A_k, X>;
//   Mask    - an ordered set of cells, component k is X at the k-th cell.
// Mask is first-class rather than a list of indicator matrices; completion
// problems would otherwise cost O(d*m*n) memory.
class AffineOperator {
 public:
  enum class Kind { General, Mask };

  static AffineOperator general(std::vector<Matrix> components);
  static AffineOperator mask(int rows, int cols, std::vector<MaskCell> cells);

  Kind kind() const { return kind_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return dim_; }

  const std::vector<Matrix>& components() const;
  const std::vector<MaskCell>& cells() const;

  Vector apply(const Matrix& x) const;
  Matrix adjoint(const Vector& y) const;

 private:
  AffineOperator() = default;

  Kind kind_ = Kind::Mask;
  int rows_ = 0;
  int cols_ = 0;
  int dim_ = 0;
  std::vector<Matrix> components_;  // General
  std::vector<MaskCell> cells_;     // Mask, sorted row-major
};

struct OperatorNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of the stacked d x (m*n) matrix, by power iteration
// on X -> A*(A(X)). Mask operators are coordinate projections and return
// exactly 1 without iterating.
OperatorNormEstimate operator_norm(const AffineOperator& op, int max_iters = 200,
                                   double tol = 1e-12);

// Uniform random s-subset of the m*n cells via partial Fisher-Yates,
// canonical row-major order, fully determined by the seed.
AffineOperator sample_mask(int rows, int cols, int count, std::uint64_t seed);

// Text format: first line "m n s", then s lines "i j" (0-based, row-major).
void save_mask(const AffineOperator& op, const std::string& path);
AffineOperator load_mask(const std::string& path);

}  // namespace lrr

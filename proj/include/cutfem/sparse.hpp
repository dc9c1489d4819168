#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

namespace cutfem {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Compressed sparse rows built from coordinate triplets with index-sorted
/// deterministic summation, so assembled matrices are bitwise reproducible
/// no matter in which order the element loop produced the triplets. Structural
/// zeros are kept; the pattern is part of the matrix identity.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  static SparseMatrix from_triplets(int n, std::vector<Triplet> triplets);

  int rows() const { return n_; }
  std::size_t nnz() const { return col_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  double coeff(int i, int j) const;
  std::vector<double> diagonal() const;
  double max_abs() const;
  /// max |A_ij - A_ji| over all entries.
  double symmetry_gap() const;

  /// y = A x (OpenMP over rows; each row is summed in index order).
  void multiply(const double* x, double* y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;

  /// A + alpha * B over the union pattern.
  SparseMatrix axpy(double alpha, const SparseMatrix& other) const;

  /// D^{-1/2} A D^{-1/2} with rows whose diagonal is ~0 left unscaled.
  SparseMatrix diagonally_scaled() const;

  bool pattern_equals(const SparseMatrix& other) const;
  bool pattern_contains(const SparseMatrix& other) const;

  Eigen::MatrixXd to_dense() const;

  /// Coordinate text format "i j value", 0-based, sorted by (i, j).
  void write_coordinate(std::ostream& out) const;

 private:
  int n_ = 0;
  std::vector<int> row_ptr_ = {0};
  std::vector<int> col_;
  std::vector<double> val_;
};

}  // namespace cutfem

#include "cutfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>

#include "cutfem/errors.hpp"

namespace cutfem {

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> triplets) {
  // stable_sort keeps insertion order within each (i, j) group, which fixes
  // the summation order independently of how many threads produced the list.
  std::stable_sort(triplets.begin(), triplets.end(),
                   [](const Triplet& a, const Triplet& b) {
                     if (a.row != b.row) return a.row < b.row;
                     return a.col < b.col;
                   });
  SparseMatrix m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (size_t i = 0; i < triplets.size();) {
    const int r = triplets[i].row;
    const int c = triplets[i].col;
    if (r < 0 || r >= n || c < 0 || c >= n) {
      throw Error(ErrorCode::contract_violation, "triplet index out of range");
    }
    double sum = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
      sum += triplets[i].value;
      ++i;
    }
    m.col_.push_back(c);
    m.val_.push_back(sum);
    ++m.row_ptr_[r + 1];
  }
  for (int r = 0; r < n; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = col_.begin() + row_ptr_[i];
  const auto end = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return val_[it - col_.begin()];
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = coeff(i, i);
  return d;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::symmetry_gap() const {
  double gap = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      gap = std::max(gap, std::abs(val_[k] - coeff(col_[k], i)));
    }
  }
  return gap;
}

void SparseMatrix::multiply(const double* x, double* y) const {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      sum += val_[k] * x[col_[k]];
    }
    y[i] = sum;
  }
}

std::vector<double> SparseMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n_);
  multiply(x.data(), y.data());
  return y;
}

SparseMatrix SparseMatrix::axpy(double alpha, const SparseMatrix& other) const {
  if (other.n_ != n_) {
    throw Error(ErrorCode::contract_violation, "axpy: size mismatch");
  }
  SparseMatrix m;
  m.n_ = n_;
  m.row_ptr_.assign(n_ + 1, 0);
  m.col_.reserve(nnz() + other.nnz());
  m.val_.reserve(nnz() + other.nnz());
  for (int i = 0; i < n_; ++i) {
    int ka = row_ptr_[i], kb = other.row_ptr_[i];
    const int ea = row_ptr_[i + 1], eb = other.row_ptr_[i + 1];
    while (ka < ea || kb < eb) {
      int c;
      double v;
      if (kb >= eb || (ka < ea && col_[ka] < other.col_[kb])) {
        c = col_[ka];
        v = val_[ka++];
      } else if (ka >= ea || other.col_[kb] < col_[ka]) {
        c = other.col_[kb];
        v = alpha * other.val_[kb++];
      } else {
        c = col_[ka];
        v = val_[ka++] + alpha * other.val_[kb++];
      }
      m.col_.push_back(c);
      m.val_.push_back(v);
      ++m.row_ptr_[i + 1];
    }
  }
  for (int r = 0; r < n_; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::diagonally_scaled() const {
  const std::vector<double> d = diagonal();
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, std::abs(v));
  std::vector<double> s(n_, 1.0);
  for (int i = 0; i < n_; ++i) {
    if (d[i] > 1e-14 * dmax) s[i] = 1.0 / std::sqrt(d[i]);
  }
  SparseMatrix m = *this;
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m.val_[k] = s[i] * val_[k] * s[col_[k]];
    }
  }
  return m;
}

bool SparseMatrix::pattern_equals(const SparseMatrix& other) const {
  return n_ == other.n_ && row_ptr_ == other.row_ptr_ && col_ == other.col_;
}

bool SparseMatrix::pattern_contains(const SparseMatrix& other) const {
  if (n_ != other.n_) return false;
  for (int i = 0; i < n_; ++i) {
    int ka = row_ptr_[i];
    const int ea = row_ptr_[i + 1];
    for (int kb = other.row_ptr_[i]; kb < other.row_ptr_[i + 1]; ++kb) {
      while (ka < ea && col_[ka] < other.col_[kb]) ++ka;
      if (ka == ea || col_[ka] != other.col_[kb]) return false;
    }
  }
  return true;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      m(i, col_[k]) = val_[k];
    }
  }
  return m;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
  out.precision(17);
  for (int i = 0; i < n_; ++i) {
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out << i << " " << col_[k] << " " << val_[k] << "\n";
    }
  }
}

}  // namespace cutfem

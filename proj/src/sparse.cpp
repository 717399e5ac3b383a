#include "nct/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "nct/error.hpp"

namespace nct {

void SparseOperator::apply(const std::vector<double>& x,
                           std::vector<double>& y) const {
  if (x.size() != n_cols_) {
    throw Error(ErrorKind::DimensionMismatch, "matrix-vector size mismatch");
  }
  y.assign(n_rows_, 0.0);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      acc += values_[k] * x[col_idx_[k]];
    }
    y[r] = acc;
  }
}

std::vector<double> SparseOperator::apply(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return y;
}

double SparseOperator::diagonal(std::size_t row) const {
  for (std::size_t k = row_ptr_[row]; k < row_ptr_[row + 1]; ++k) {
    if (col_idx_[k] == row) return values_[k];
  }
  return 0.0;
}

void SparseOperator::export_coordinate(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write matrix file " + path);
  char buf[96];
  for (std::size_t r = 0; r < n_rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", r, col_idx_[k], values_[k]);
      out << buf;
    }
  }
}

SparseOperator SparseBuilder::compress(bool symmetric) && {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseOperator op;
  op.n_rows_ = rows_;
  op.n_cols_ = cols_;
  op.symmetric_ = symmetric;
  op.row_ptr_.assign(rows_ + 1, 0);
  for (std::size_t i = 0; i < entries_.size();) {
    const std::size_t r = entries_[i].row;
    const std::size_t c = entries_[i].col;
    if (r >= rows_ || c >= cols_) {
      throw Error(ErrorKind::DimensionMismatch, "sparse entry out of range");
    }
    double acc = 0.0;
    while (i < entries_.size() && entries_[i].row == r && entries_[i].col == c) {
      acc += entries_[i].value;
      ++i;
    }
    if (!std::isfinite(acc)) {
      throw Error(ErrorKind::SolverFailure, "non-finite matrix coefficient");
    }
    op.col_idx_.push_back(c);
    op.values_.push_back(acc);
    ++op.row_ptr_[r + 1];
  }
  for (std::size_t r = 0; r < rows_; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
  return op;
}

}  // namespace nct

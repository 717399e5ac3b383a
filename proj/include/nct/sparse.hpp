#ifndef NCT_SPARSE_HPP
#define NCT_SPARSE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace nct {

/// Compressed-row sparse matrix, immutable after assembly. Build through
/// SparseBuilder; duplicate (row,col) entries are summed on compression.
class SparseOperator {
 public:
  SparseOperator() = default;

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  bool symmetric() const { return symmetric_; }

  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  std::vector<double> apply(const std::vector<double>& x) const;

  double diagonal(std::size_t row) const;

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// Coordinate text format, one `row col value` line per entry.
  void export_coordinate(const std::string& path) const;

  friend class SparseBuilder;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  bool symmetric_ = false;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

class SparseBuilder {
 public:
  SparseBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t row, std::size_t col, double value) {
    entries_.push_back({row, col, value});
  }

  SparseOperator compress(bool symmetric = false) &&;

 private:
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::size_t rows_, cols_;
  std::vector<Entry> entries_;
};

}  // namespace nct

#endif

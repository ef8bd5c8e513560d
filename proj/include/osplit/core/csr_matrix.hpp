#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "osplit/core/types.hpp"

namespace osplit {

/// Compressed sparse row matrix with a cached column-major copy, so both
/// row slices and column slices are O(nnz of the slice).
class CsrMatrix {
 public:
  struct Slice {
    std::span<const Index> indices;
    std::span<const double> values;
    Index size() const { return static_cast<Index>(indices.size()); }
  };

  CsrMatrix() = default;

  CsrMatrix(Index n_rows, Index n_cols, std::vector<Index> row_offsets,
            std::vector<Index> col_indices, std::vector<double> values)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
    build_columns();
  }

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static CsrMatrix from_triplets(Index n_rows, Index n_cols,
                                 std::vector<Eigen::Triplet<double>> triplets) {
    require(n_rows >= 0 && n_cols >= 0, "CsrMatrix: negative shape");
    std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
      return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
    std::vector<Index> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    Index prev_r = -1, prev_c = -1;
    for (const auto& t : triplets) {
      require(t.row() >= 0 && t.row() < n_rows && t.col() >= 0 && t.col() < n_cols,
              "CsrMatrix: triplet out of range");
      if (t.row() == prev_r && t.col() == prev_c) {
        vals.back() += t.value();
        continue;
      }
      cols.push_back(t.col());
      vals.push_back(t.value());
      ++offsets[static_cast<std::size_t>(t.row()) + 1];
      prev_r = t.row();
      prev_c = t.col();
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return CsrMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
  }

  static CsrMatrix from_dense(const Matrix& m) {
    std::vector<Eigen::Triplet<double>> t;
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j)
        if (m(i, j) != 0.0) t.emplace_back(i, j, m(i, j));
    return from_triplets(m.rows(), m.cols(), std::move(t));
  }

  Index rows() const { return n_rows_; }
  Index cols() const { return n_cols_; }
  Index nnz() const { return n_rows_ == 0 ? 0 : row_offsets_.back(); }

  const std::vector<Index>& row_offsets() const { return row_offsets_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  Slice row(Index i) const {
    const auto b = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(row_offsets_[static_cast<std::size_t>(i) + 1]);
    return {std::span<const Index>(col_indices_).subspan(b, e - b),
            std::span<const double>(values_).subspan(b, e - b)};
  }

  Slice col(Index j) const {
    const auto b = static_cast<std::size_t>(col_offsets_[static_cast<std::size_t>(j)]);
    const auto e = static_cast<std::size_t>(col_offsets_[static_cast<std::size_t>(j) + 1]);
    return {std::span<const Index>(row_indices_).subspan(b, e - b),
            std::span<const double>(col_values_).subspan(b, e - b)};
  }

  /// y = A x
  void multiply(const Vector& x, Vector& y) const {
    require_dim(x, n_cols_, "CsrMatrix::multiply");
    y.resize(n_rows_);
    for (Index i = 0; i < n_rows_; ++i) {
      double s = 0.0;
      const auto r = row(i);
      for (Index k = 0; k < r.size(); ++k) s += r.values[k] * x[r.indices[k]];
      y[i] = s;
    }
  }

  Vector multiply(const Vector& x) const {
    Vector y;
    multiply(x, y);
    return y;
  }

  /// x = A^T y, accumulated column by column (fixed summation order).
  void multiply_transpose(const Vector& y, Vector& x) const {
    require_dim(y, n_rows_, "CsrMatrix::multiply_transpose");
    x.resize(n_cols_);
    for (Index j = 0; j < n_cols_; ++j) {
      double s = 0.0;
      const auto c = col(j);
      for (Index k = 0; k < c.size(); ++k) s += c.values[k] * y[c.indices[k]];
      x[j] = s;
    }
  }

  Vector multiply_transpose(const Vector& y) const {
    Vector x;
    multiply_transpose(y, x);
    return x;
  }

  Matrix to_dense() const {
    Matrix m = Matrix::Zero(n_rows_, n_cols_);
    for (Index i = 0; i < n_rows_; ++i) {
      const auto r = row(i);
      for (Index k = 0; k < r.size(); ++k) m(i, r.indices[k]) = r.values[k];
    }
    return m;
  }

  bool operator==(const CsrMatrix& o) const {
    return n_rows_ == o.n_rows_ && n_cols_ == o.n_cols_ &&
           row_offsets_ == o.row_offsets_ && col_indices_ == o.col_indices_ &&
           values_ == o.values_;
  }

  /// Text format: `csr n_rows n_cols nnz`, then one line each for
  /// row_offsets, col_indices and values (17 significant digits).
  void write(std::ostream& os) const {
    os << "csr " << n_rows_ << ' ' << n_cols_ << ' ' << nnz() << '\n';
    auto join = [&os](const auto& v, auto&& fmt) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        fmt(v[i]);
      }
      os << '\n';
    };
    join(row_offsets_, [&os](Index v) { os << v; });
    join(col_indices_, [&os](Index v) { os << v; });
    join(values_, [&os](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
    });
  }

  static CsrMatrix read(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csr: missing header line");
    std::istringstream header(line);
    std::string tag;
    Index r = -1, c = -1, nnz = -1;
    header >> tag >> r >> c >> nnz;
    if (tag != "csr" || !header || r < 0 || c < 0 || nnz < 0)
      throw std::runtime_error("csr: malformed header '" + line + "'");

    auto read_line = [&is](const char* what, std::size_t expected, auto parse) {
      std::string l;
      // an empty array is written as a blank line, which may also be absent at EOF
      if (!std::getline(is, l) && expected > 0)
        throw std::runtime_error(std::string("csr: missing ") + what + " line");
      std::istringstream ls(l);
      using T = decltype(parse(std::declval<std::istringstream&>()));
      std::vector<T> out;
      out.reserve(expected);
      std::string tok;
      while (ls >> tok) {
        std::istringstream ts(tok);
        out.push_back(parse(ts));
        if (!ts || !ts.eof())
          throw std::runtime_error(std::string("csr: bad token '") + tok + "' in " + what);
      }
      if (out.size() != expected)
        throw std::runtime_error(std::string("csr: wrong entry count in ") + what);
      return out;
    };
    auto parse_index = [](std::istringstream& s) {
      long long v = 0;
      s >> v;
      return static_cast<Index>(v);
    };
    auto parse_double = [](std::istringstream& s) {
      double v = 0;
      s >> v;
      return v;
    };
    auto offsets = read_line("row_offsets", static_cast<std::size_t>(r) + 1, parse_index);
    auto cols = read_line("col_indices", static_cast<std::size_t>(nnz), parse_index);
    auto vals = read_line("values", static_cast<std::size_t>(nnz), parse_double);
    return CsrMatrix(r, c, std::move(offsets), std::move(cols), std::move(vals));
  }

 private:
  void validate() const {
    require(n_rows_ >= 0 && n_cols_ >= 0, "CsrMatrix: negative shape");
    require(row_offsets_.size() == static_cast<std::size_t>(n_rows_) + 1,
            "CsrMatrix: row_offsets must have n_rows+1 entries");
    require(row_offsets_.front() == 0, "CsrMatrix: row_offsets[0] must be 0");
    for (std::size_t i = 1; i < row_offsets_.size(); ++i)
      require(row_offsets_[i] >= row_offsets_[i - 1], "CsrMatrix: row_offsets must be nondecreasing");
    require(col_indices_.size() == static_cast<std::size_t>(row_offsets_.back()) &&
                values_.size() == col_indices_.size(),
            "CsrMatrix: nnz mismatch");
    for (Index i = 0; i < n_rows_; ++i) {
      const auto b = row_offsets_[static_cast<std::size_t>(i)];
      const auto e = row_offsets_[static_cast<std::size_t>(i) + 1];
      for (Index k = b; k < e; ++k) {
        const Index c = col_indices_[static_cast<std::size_t>(k)];
        require(c >= 0 && c < n_cols_, "CsrMatrix: column index out of range");
        if (k > b)
          require(c > col_indices_[static_cast<std::size_t>(k) - 1],
                  "CsrMatrix: column indices must be strictly increasing within a row");
      }
    }
  }

  void build_columns() {
    col_offsets_.assign(static_cast<std::size_t>(n_cols_) + 1, 0);
    for (Index c : col_indices_) ++col_offsets_[static_cast<std::size_t>(c) + 1];
    std::partial_sum(col_offsets_.begin(), col_offsets_.end(), col_offsets_.begin());
    row_indices_.resize(col_indices_.size());
    col_values_.resize(values_.size());
    std::vector<Index> fill(col_offsets_.begin(), col_offsets_.end() - 1);
    for (Index i = 0; i < n_rows_; ++i) {
      for (Index k = row_offsets_[static_cast<std::size_t>(i)];
           k < row_offsets_[static_cast<std::size_t>(i) + 1]; ++k) {
        const auto c = static_cast<std::size_t>(col_indices_[static_cast<std::size_t>(k)]);
        const auto dst = static_cast<std::size_t>(fill[c]++);
        row_indices_[dst] = i;
        col_values_[dst] = values_[static_cast<std::size_t>(k)];
      }
    }
  }

  Index n_rows_ = 0;
  Index n_cols_ = 0;
  std::vector<Index> row_offsets_{0};
  std::vector<Index> col_indices_;
  std::vector<double> values_;
  // column-major copy
  std::vector<Index> col_offsets_{0};
  std::vector<Index> row_indices_;
  std::vector<double> col_values_;
};

}  // namespace osplit

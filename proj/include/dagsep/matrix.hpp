// Copyright 2026 dagsep project contributors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Dense matrix carriers for the whole library: BinaryMatrix over {0,1}
// with one bit row per machine word, and RealMatrix over doubles.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "dagsep/error.hpp"

namespace dagsep {

// Largest supported node count; a binary row must fit one 64-bit word.
#ifndef DAGSEP_MAX_NODES
inline constexpr int kMaxNodes = 64;
#else
inline constexpr int kMaxNodes = DAGSEP_MAX_NODES;
static_assert(DAGSEP_MAX_NODES >= 1 && DAGSEP_MAX_NODES <= 64);
#endif

// Pivots below this magnitude are treated as singular.
inline constexpr double kPivotTolerance = 1e-12;

// Rectangular 0/1 matrix. Rows are stored as bit masks, so the column
// count is capped at kMaxNodes. Element access is 0-based.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;

  BinaryMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw ValidationError("negative matrix size");
    if (cols > kMaxNodes)
      throw ValidationError("binary matrix wider than " +
                            std::to_string(kMaxNodes) + " columns");
    bits_.assign(static_cast<std::size_t>(rows), 0);
  }

  static BinaryMatrix identity(int n) {
    BinaryMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  bool get(int i, int j) const {
    check_index(i, j);
    return (bits_[static_cast<std::size_t>(i)] >> j) & 1ULL;
  }

  void set(int i, int j, bool value) {
    check_index(i, j);
    const std::uint64_t bit = 1ULL << j;
    if (value)
      bits_[static_cast<std::size_t>(i)] |= bit;
    else
      bits_[static_cast<std::size_t>(i)] &= ~bit;
  }

  std::uint64_t row_bits(int i) const {
    if (i < 0 || i >= rows_) throw ValidationError("row index out of range");
    return bits_[static_cast<std::size_t>(i)];
  }

  void or_into_row(int i, std::uint64_t mask) {
    if (i < 0 || i >= rows_) throw ValidationError("row index out of range");
    bits_[static_cast<std::size_t>(i)] |= mask & col_mask();
  }

  BinaryMatrix transposed() const {
    BinaryMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
      std::uint64_t row = bits_[static_cast<std::size_t>(i)];
      while (row != 0) {
        const int j = std::countr_zero(row);
        row &= row - 1;
        out.set(j, i, true);
      }
    }
    return out;
  }

  // Boolean matrix product: out(i,j) = OR_k get(i,k) & rhs(k,j).
  BinaryMatrix bool_product(const BinaryMatrix& rhs) const {
    if (cols_ != rhs.rows_)
      throw ValidationError("boolean product: inner dimensions differ");
    BinaryMatrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i) {
      std::uint64_t acc = 0;
      std::uint64_t row = bits_[static_cast<std::size_t>(i)];
      while (row != 0) {
        const int k = std::countr_zero(row);
        row &= row - 1;
        acc |= rhs.bits_[static_cast<std::size_t>(k)];
      }
      out.bits_[static_cast<std::size_t>(i)] = acc;
    }
    return out;
  }

  // Submatrix with the given 0-based row/column selections, in order.
  BinaryMatrix sub(const std::vector<int>& row_sel,
                   const std::vector<int>& col_sel) const {
    BinaryMatrix out(static_cast<int>(row_sel.size()),
                     static_cast<int>(col_sel.size()));
    for (std::size_t i = 0; i < row_sel.size(); ++i)
      for (std::size_t j = 0; j < col_sel.size(); ++j)
        out.set(static_cast<int>(i), static_cast<int>(j),
                get(row_sel[i], col_sel[j]));
    return out;
  }

  // Contiguous block of size nr x nc with top-left corner (r0, c0).
  BinaryMatrix block(int r0, int nr, int c0, int nc) const {
    if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ ||
        c0 + nc > cols_)
      throw ValidationError("block out of range");
    BinaryMatrix out(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) out.set(i, j, get(r0 + i, c0 + j));
    return out;
  }

  bool is_symmetric() const {
    if (!square()) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if (get(i, j) != get(j, i)) return false;
    return true;
  }

  bool has_unit_diagonal() const {
    if (!square()) return false;
    for (int i = 0; i < rows_; ++i)
      if (!get(i, i)) return false;
    return true;
  }

  bool is_upper_triangular() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < i && j < cols_; ++j)
        if (get(i, j)) return false;
    return true;
  }

  // a <= b entrywise.
  static bool entrywise_leq(const BinaryMatrix& a, const BinaryMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (int i = 0; i < a.rows_; ++i)
      if ((a.bits_[static_cast<std::size_t>(i)] &
           ~b.bits_[static_cast<std::size_t>(i)]) != 0)
        return false;
    return true;
  }

  friend bool operator==(const BinaryMatrix& a, const BinaryMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.bits_ == b.bits_;
  }
  friend bool operator!=(const BinaryMatrix& a, const BinaryMatrix& b) {
    return !(a == b);
  }

  std::string to_text() const {
    std::string out;
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        if (j > 0) out += ' ';
        out += get(i, j) ? '1' : '0';
      }
      out += '\n';
    }
    return out;
  }

 private:
  void check_index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw ValidationError("matrix index out of range");
  }

  std::uint64_t col_mask() const {
    return cols_ == 64 ? ~0ULL : ((1ULL << cols_) - 1);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Entrywise OR of equally sized matrices.
inline BinaryMatrix bool_or(const BinaryMatrix& a, const BinaryMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("boolean or: sizes differ");
  BinaryMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    out.or_into_row(i, a.row_bits(i) | b.row_bits(i));
  return out;
}

// Assembles [[aa, ab], [ba, bb]]; block shapes must be consistent.
inline BinaryMatrix from_blocks(const BinaryMatrix& aa, const BinaryMatrix& ab,
                                const BinaryMatrix& ba,
                                const BinaryMatrix& bb) {
  if (aa.rows() != ab.rows() || ba.rows() != bb.rows() ||
      aa.cols() != ba.cols() || ab.cols() != bb.cols())
    throw ValidationError("from_blocks: inconsistent block shapes");
  BinaryMatrix out(aa.rows() + ba.rows(), aa.cols() + ab.cols());
  const int ra = aa.rows(), ca = aa.cols();
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j) {
      const bool v = (i < ra) ? (j < ca ? aa.get(i, j) : ab.get(i, j - ca))
                              : (j < ca ? ba.get(i - ra, j)
                                        : bb.get(i - ra, j - ca));
      out.set(i, j, v);
    }
  return out;
}

// Rectangular dense real matrix, row major, 0-based access.
class RealMatrix {
 public:
  RealMatrix() = default;

  RealMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw ValidationError("negative matrix size");
    v_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
              0.0);
  }

  static RealMatrix identity(int n) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  // Builds a matrix from nested initializer lists; rejects non-finite
  // entries and ragged rows.
  static RealMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    const int nr = static_cast<int>(rows.size());
    const int nc = nr > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    RealMatrix m(nr, nc);
    int i = 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != nc)
        throw ValidationError("from_rows: ragged rows");
      int j = 0;
      for (double x : row) {
        if (!std::isfinite(x))
          throw ValidationError("from_rows: non-finite entry");
        m(i, j++) = x;
      }
      ++i;
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double operator()(int i, int j) const {
    check_index(i, j);
    return v_[idx(i, j)];
  }
  double& operator()(int i, int j) {
    check_index(i, j);
    return v_[idx(i, j)];
  }

  RealMatrix transposed() const {
    RealMatrix out(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(j, i) = v_[idx(i, j)];
    return out;
  }

  RealMatrix sub(const std::vector<int>& row_sel,
                 const std::vector<int>& col_sel) const {
    RealMatrix out(static_cast<int>(row_sel.size()),
                   static_cast<int>(col_sel.size()));
    for (std::size_t i = 0; i < row_sel.size(); ++i)
      for (std::size_t j = 0; j < col_sel.size(); ++j)
        out(static_cast<int>(i), static_cast<int>(j)) =
            (*this)(row_sel[i], col_sel[j]);
    return out;
  }

  RealMatrix block(int r0, int nr, int c0, int nc) const {
    if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ ||
        c0 + nc > cols_)
      throw ValidationError("block out of range");
    RealMatrix out(nr, nc);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols_ != b.rows_)
      throw ValidationError("matrix product: inner dimensions differ");
    RealMatrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend RealMatrix operator+(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw ValidationError("matrix sum: sizes differ");
    RealMatrix out = a;
    for (std::size_t i = 0; i < out.v_.size(); ++i) out.v_[i] += b.v_[i];
    return out;
  }

  friend RealMatrix operator-(const RealMatrix& a, const RealMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw ValidationError("matrix difference: sizes differ");
    RealMatrix out = a;
    for (std::size_t i = 0; i < out.v_.size(); ++i) out.v_[i] -= b.v_[i];
    return out;
  }

  friend RealMatrix operator-(const RealMatrix& a) {
    RealMatrix out = a;
    for (double& x : out.v_) x = -x;
    return out;
  }

  std::string to_text() const {
    std::string out;
    char buf[32];
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) {
        std::snprintf(buf, sizeof(buf), "%10.6f", (*this)(i, j));
        if (j > 0) out += ' ';
        out += buf;
      }
      out += '\n';
    }
    return out;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }
  void check_index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw ValidationError("matrix index out of range");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

inline RealMatrix from_blocks(const RealMatrix& aa, const RealMatrix& ab,
                              const RealMatrix& ba, const RealMatrix& bb) {
  if (aa.rows() != ab.rows() || ba.rows() != bb.rows() ||
      aa.cols() != ba.cols() || ab.cols() != bb.cols())
    throw ValidationError("from_blocks: inconsistent block shapes");
  RealMatrix out(aa.rows() + ba.rows(), aa.cols() + ab.cols());
  const int ra = aa.rows(), ca = aa.cols();
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      out(i, j) = (i < ra)
                      ? (j < ca ? aa(i, j) : ab(i, j - ca))
                      : (j < ca ? ba(i - ra, j) : bb(i - ra, j - ca));
  return out;
}

inline bool approx_equal(const RealMatrix& a, const RealMatrix& b,
                         double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return (a - b).max_abs() <= tol;
}

// Pattern of entries with |x| > tol.
inline BinaryMatrix indicator(const RealMatrix& m, double tol) {
  BinaryMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > tol) out.set(i, j, true);
  return out;
}

// Solves A X = B by Gaussian elimination with partial pivoting.
inline RealMatrix solve(RealMatrix a, RealMatrix b) {
  if (!a.square()) throw ValidationError("solve: matrix not square");
  if (a.rows() != b.rows()) throw ValidationError("solve: sizes differ");
  if (!a.all_finite() || !b.all_finite())
    throw ValidationError("solve: non-finite input");
  const int n = a.rows();
  const int m = b.cols();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < kPivotTolerance)
      throw SingularPivotError("solve: pivot " + std::to_string(k + 1) +
                               " below tolerance");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      for (int j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      for (int j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
    }
  }
  RealMatrix x(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = n - 1; i >= 0; --i) {
      double s = b(i, j);
      for (int k = i + 1; k < n; ++k) s -= a(i, k) * x(k, j);
      x(i, j) = s / a(i, i);
    }
  if (!x.all_finite()) throw SingularPivotError("solve: non-finite result");
  return x;
}

inline RealMatrix inverse(const RealMatrix& a) {
  return solve(a, RealMatrix::identity(a.rows()));
}

}  // namespace dagsep

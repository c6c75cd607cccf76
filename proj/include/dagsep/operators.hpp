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
// The two matrix operators everything else is built from:
//
//   partial_invert (inv): a sweep-like transform that inverts a square
//   real matrix "on" one index, or on a set of indices. Inverting on all
//   indices gives the ordinary inverse.
//
//   partial_close (zer): the binary analogue. Closing on index k adds an
//   (i,j) edge wherever the pattern has both (i,k) and (k,j). Closing on
//   all indices gives the reflexive transitive closure.
//
// Both operators are commutative in the closed-on index set; partial
// inversion can be undone, partial closure cannot (it absorbs).
// Index arguments are 1-based, matching node labels everywhere else.

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/matrix.hpp"

namespace dagsep {

namespace detail {

inline void check_pivot_index(int k, int n, const char* op) {
  if (k < 1 || k > n)
    throw ValidationError(std::string(op) + ": index " + std::to_string(k) +
                          " out of range 1.." + std::to_string(n));
}

// Sorted, validated, duplicate-free copy of a 1-based index set.
inline std::vector<int> checked_index_set(std::vector<int> idx, int n,
                                          const char* op) {
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    check_pivot_index(idx[i], n, op);
    if (i > 0 && idx[i] == idx[i - 1])
      throw ValidationError(std::string(op) + ": duplicate index " +
                            std::to_string(idx[i]));
  }
  return idx;
}

}  // namespace detail

// Partial inversion of a square matrix on index k (1-based):
//   n_kk = 1/m_kk, n_ik = m_ik/m_kk, n_kj = -m_kj/m_kk,
//   n_ij = m_ij - m_ik m_kj / m_kk   for i, j != k.
inline RealMatrix partial_invert(const RealMatrix& m, int k) {
  if (!m.square()) throw ValidationError("partial_invert: matrix not square");
  detail::check_pivot_index(k, m.rows(), "partial_invert");
  const int n = m.rows();
  const int p = k - 1;
  const double pivot = m(p, p);
  if (std::abs(pivot) < kPivotTolerance)
    throw SingularPivotError("partial_invert: pivot at index " +
                             std::to_string(k) + " below tolerance");
  RealMatrix out(n, n);
  out(p, p) = 1.0 / pivot;
  for (int i = 0; i < n; ++i) {
    if (i == p) continue;
    out(i, p) = m(i, p) / pivot;
    out(p, i) = -m(p, i) / pivot;
  }
  for (int i = 0; i < n; ++i) {
    if (i == p) continue;
    const double f = m(i, p) / pivot;
    for (int j = 0; j < n; ++j) {
      if (j == p) continue;
      out(i, j) = m(i, j) - f * m(p, j);
    }
  }
  if (!out.all_finite())
    throw SingularPivotError("partial_invert: non-finite result");
  return out;
}

// Partial inversion on a set of indices, applied in ascending order. The
// result does not depend on the order; a fixed order keeps runs
// bit-for-bit reproducible.
inline RealMatrix partial_invert(const RealMatrix& m, std::vector<int> idx) {
  if (!m.square()) throw ValidationError("partial_invert: matrix not square");
  idx = detail::checked_index_set(std::move(idx), m.rows(), "partial_invert");
  RealMatrix out = m;
  for (int k : idx) out = partial_invert(out, k);
  return out;
}

// Partial closure of a binary pattern on index k (1-based):
//   n_kk = 1, row and column k copied,
//   n_ij = m_ij or (m_ik and m_kj)   for i, j != k.
inline BinaryMatrix partial_close(const BinaryMatrix& m, int k) {
  if (!m.square()) throw ValidationError("partial_close: matrix not square");
  detail::check_pivot_index(k, m.rows(), "partial_close");
  const int p = k - 1;
  BinaryMatrix out = m;
  const std::uint64_t row_k = m.row_bits(p);
  for (int i = 0; i < m.rows(); ++i) {
    if (i == p) continue;
    if (m.get(i, p)) out.or_into_row(i, row_k);
  }
  out.set(p, p, true);
  return out;
}

inline BinaryMatrix partial_close(const BinaryMatrix& m,
                                  std::vector<int> idx) {
  if (!m.square()) throw ValidationError("partial_close: matrix not square");
  idx = detail::checked_index_set(std::move(idx), m.rows(), "partial_close");
  BinaryMatrix out = m;
  for (int k : idx) out = partial_close(out, k);
  return out;
}

// Reflexive transitive closure: partial closure on every index.
inline BinaryMatrix transitive_closure(const BinaryMatrix& m) {
  if (!m.square())
    throw ValidationError("transitive_closure: matrix not square");
  BinaryMatrix out = m;
  for (int k = 1; k <= m.rows(); ++k) out = partial_close(out, k);
  return out;
}

}  // namespace dagsep

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
// Parent graphs: directed acyclic graphs on nodes 1..d whose total order
// is part of the structure. An arrow i <- j requires i < j, so acyclicity
// holds by construction. The graph is stored as its edge matrix: an upper
// triangular 0/1 matrix with unit diagonal whose (i,j) entry flags the
// arrow i <- j. Node labels are 1-based in every public interface.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/matrix.hpp"
#include "dagsep/operators.hpp"

namespace dagsep {

// A set of node labels, kept sorted ascending.
using NodeList = std::vector<int>;

// Sorts, range-checks and rejects duplicate labels.
inline NodeList normalized_nodes(NodeList nodes, int d, const char* what) {
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 1 || nodes[i] > d)
      throw ValidationError(std::string(what) + ": node " +
                            std::to_string(nodes[i]) + " out of range 1.." +
                            std::to_string(d));
    if (i > 0 && nodes[i] == nodes[i - 1])
      throw ValidationError(std::string(what) + ": duplicate node " +
                            std::to_string(nodes[i]));
  }
  return nodes;
}

inline bool contains_node(const NodeList& sorted, int label) {
  return std::binary_search(sorted.begin(), sorted.end(), label);
}

inline NodeList complement_nodes(int d, const NodeList& sorted) {
  NodeList out;
  out.reserve(static_cast<std::size_t>(d) - sorted.size());
  for (int v = 1; v <= d; ++v)
    if (!contains_node(sorted, v)) out.push_back(v);
  return out;
}

inline bool disjoint_nodes(const NodeList& a, const NodeList& b) {
  for (int v : a)
    if (contains_node(b, v)) return false;
  return true;
}

inline NodeList union_nodes(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline NodeList difference_nodes(const NodeList& a, const NodeList& b) {
  NodeList out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

// 0-based matrix positions of a list of 1-based labels.
inline std::vector<int> label_positions(const NodeList& labels) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int v : labels) out.push_back(v - 1);
  return out;
}

class ParentGraph {
 public:
  ParentGraph(int d, const std::vector<std::pair<int, int>>& arrows)
      : d_(d) {
    if (d < 1) throw ValidationError("parent graph needs at least one node");
    if (d > kMaxNodes)
      throw ValidationError("parent graph larger than " +
                            std::to_string(kMaxNodes) + " nodes");
    edges_ = BinaryMatrix::identity(d);
    for (const auto& [i, j] : arrows) {
      if (i < 1 || i > d || j < 1 || j > d)
        throw ValidationError("arrow (" + std::to_string(i) + "," +
                              std::to_string(j) + ") out of range 1.." +
                              std::to_string(d));
      if (i >= j)
        throw ValidationError("arrow (" + std::to_string(i) + "," +
                              std::to_string(j) +
                              ") violates the node order (needs i < j)");
      if (edges_.get(i - 1, j - 1))
        throw ValidationError("duplicate arrow (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      edges_.set(i - 1, j - 1, true);
    }
  }

  int size() const { return d_; }

  // Arrow i <- j; defined for i < j only.
  bool has_arrow(int i, int j) const {
    check_node(i);
    check_node(j);
    if (i >= j) throw ValidationError("has_arrow requires i < j");
    return edges_.get(i - 1, j - 1);
  }

  // True when the node pair carries an edge, in either role.
  bool coupled(int u, int v) const {
    check_node(u);
    check_node(v);
    if (u == v) throw ValidationError("coupled: nodes must differ");
    const int i = std::min(u, v), j = std::max(u, v);
    return edges_.get(i - 1, j - 1);
  }

  const BinaryMatrix& edge_matrix() const { return edges_; }

  NodeList parents(int node) const {
    check_node(node);
    NodeList out;
    for (int j = node + 1; j <= d_; ++j)
      if (edges_.get(node - 1, j - 1)) out.push_back(j);
    return out;
  }

  std::vector<std::pair<int, int>> arrows() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= d_; ++i)
      for (int j = i + 1; j <= d_; ++j)
        if (edges_.get(i - 1, j - 1)) out.emplace_back(i, j);
    return out;
  }

  // Closure of the edge matrix: entry (i,j) flags "j is an ancestor of i
  // or i = j".
  BinaryMatrix ancestral_closure() const { return transitive_closure(edges_); }

  // The seed together with all its ancestors.
  NodeList ancestral_set(const NodeList& seed) const {
    const NodeList s = normalized_nodes(seed, d_, "ancestral_set");
    const BinaryMatrix closure = ancestral_closure();
    std::uint64_t mask = 0;
    for (int v : s) mask |= closure.row_bits(v - 1);
    NodeList out;
    for (int v = 1; v <= d_; ++v)
      if ((mask >> (v - 1)) & 1ULL) out.push_back(v);
    return out;
  }

  friend bool operator==(const ParentGraph& a, const ParentGraph& b) {
    return a.d_ == b.d_ && a.edges_ == b.edges_;
  }

 private:
  void check_node(int v) const {
    if (v < 1 || v > d_)
      throw ValidationError("node " + std::to_string(v) +
                            " out of range 1.." + std::to_string(d_));
  }

  int d_;
  BinaryMatrix edges_;
};

// An independence query: is alpha independent of beta given cond implied
// for every distribution generated over the graph? The margin
// M = V \ (alpha u beta u cond) is derived; cond and M may be empty.
struct Query {
  NodeList alpha;
  NodeList beta;
  NodeList cond;
};

inline Query make_query(const ParentGraph& g, NodeList alpha, NodeList beta,
                        NodeList cond) {
  const int d = g.size();
  Query q{normalized_nodes(std::move(alpha), d, "alpha"),
          normalized_nodes(std::move(beta), d, "beta"),
          normalized_nodes(std::move(cond), d, "cond")};
  if (q.alpha.empty()) throw ValidationError("alpha must be nonempty");
  if (q.beta.empty()) throw ValidationError("beta must be nonempty");
  if (!disjoint_nodes(q.alpha, q.beta) || !disjoint_nodes(q.alpha, q.cond) ||
      !disjoint_nodes(q.beta, q.cond))
    throw ValidationError("alpha, beta and cond must be pairwise disjoint");
  return q;
}

inline NodeList query_margin(const ParentGraph& g, const Query& q) {
  return complement_nodes(g.size(),
                          union_nodes(union_nodes(q.alpha, q.beta), q.cond));
}

// An ordered split of 1..d into (a, b) with the original ascending order
// preserved inside each part. Records the label<->position maps so that
// results computed in partition order can be addressed by original
// labels.
class IndexPartition {
 public:
  IndexPartition(int d, NodeList a) : d_(d) {
    if (d < 0 || d > kMaxNodes)
      throw ValidationError("partition size out of range");
    a_ = normalized_nodes(std::move(a), d, "partition");
    b_ = complement_nodes(d, a_);
    label_at_.reserve(static_cast<std::size_t>(d));
    label_at_.insert(label_at_.end(), a_.begin(), a_.end());
    label_at_.insert(label_at_.end(), b_.begin(), b_.end());
    position_of_.assign(static_cast<std::size_t>(d) + 1, -1);
    for (int p = 0; p < d; ++p) position_of_[label_at_[p]] = p;
  }

  int size() const { return d_; }
  const NodeList& a() const { return a_; }
  const NodeList& b() const { return b_; }
  int a_size() const { return static_cast<int>(a_.size()); }
  int b_size() const { return static_cast<int>(b_.size()); }

  // 0-based position of a 1-based label in (a, b) order.
  int position_of(int label) const {
    if (label < 1 || label > d_)
      throw ValidationError("partition: label out of range");
    return position_of_[label];
  }

  // 1-based label at a 0-based position.
  int label_at(int pos) const {
    if (pos < 0 || pos >= d_)
      throw ValidationError("partition: position out of range");
    return label_at_[pos];
  }

  // True when a is a prefix of 1..d, so reordering is the identity.
  bool order_compatible() const {
    for (int p = 0; p < d_; ++p)
      if (label_at_[p] != p + 1) return false;
    return true;
  }

 private:
  int d_;
  NodeList a_, b_;
  std::vector<int> label_at_;
  std::vector<int> position_of_;
};

// Rows and columns permuted to (a, b) order.
inline BinaryMatrix reorder(const BinaryMatrix& m, const IndexPartition& p) {
  if (!m.square() || m.rows() != p.size())
    throw ValidationError("reorder: matrix size does not match partition");
  BinaryMatrix out(p.size(), p.size());
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j)
      out.set(i, j, m.get(p.label_at(i) - 1, p.label_at(j) - 1));
  return out;
}

inline RealMatrix reorder(const RealMatrix& m, const IndexPartition& p) {
  if (!m.square() || m.rows() != p.size())
    throw ValidationError("reorder: matrix size does not match partition");
  RealMatrix out(p.size(), p.size());
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j)
      out(i, j) = m(p.label_at(i) - 1, p.label_at(j) - 1);
  return out;
}

// One query per missing arrow: for j > i not a parent of i, node i is
// independent of j given the parents of i. Empty exactly when the graph
// is complete.
inline std::vector<Query> defining_independencies(const ParentGraph& g) {
  std::vector<Query> out;
  for (int i = 1; i < g.size(); ++i) {
    const NodeList par = g.parents(i);
    for (int j = i + 1; j <= g.size(); ++j) {
      if (g.has_arrow(i, j)) continue;
      out.push_back(Query{{i}, {j}, par});
    }
  }
  return out;
}

}  // namespace dagsep

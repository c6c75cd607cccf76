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
// Induced graphs. Starting from a parent graph's edge matrix, partial
// closure and a handful of block formulas produce, for any split (a, b)
// of the nodes, the patterns of structural zeros of the partially
// inverted concentration matrix: the conditional covariance pattern of
// Y_a given Y_b, the coefficient pattern of Y_b in the regression of Y_a
// on Y_b, and the marginal concentration pattern of Y_b. Specializing
// the split yields the covariance graph given a conditioning set, the
// moral graph of an ancestral set, and the concentration graph after
// marginalizing. Each result carries its node labels, so entries are
// always addressed by original labels.
//
// The numeric counterparts build the same blocks for a concrete
// triangular system and are verified, on the fly, against partial
// inversion of the concentration matrix.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/gaussian.hpp"
#include "dagsep/graph.hpp"
#include "dagsep/matrix.hpp"
#include "dagsep/operators.hpp"

namespace dagsep {

// Numeric Lemma-style block identities must agree to this tolerance.
inline constexpr double kBlockIdentityTol = 1e-9;

namespace detail {

// 1-based operator indices {1, ..., k}.
inline std::vector<int> head_indices(int k) {
  std::vector<int> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = i + 1;
  return out;
}

// 1-based operator indices {offset+1, ..., offset+count}.
inline std::vector<int> tail_indices(int offset, int count) {
  std::vector<int> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = offset + i + 1;
  return out;
}

}  // namespace detail

// The graph whose (i,j) edge says "j is an a-line ancestor of i": some
// descendant-ancestor path from i up to j exists with every inner node
// in a. Stored in partition order (a, b) with the permutation retained.
struct PartialAncestorGraph {
  IndexPartition partition;
  BinaryMatrix edges;

  // Entry by original labels.
  bool ancestor_edge(int i, int j) const {
    return edges.get(partition.position_of(i), partition.position_of(j));
  }
};

inline PartialAncestorGraph partial_ancestor_graph(const ParentGraph& g,
                                                   NodeList a) {
  IndexPartition p(g.size(), std::move(a));
  const BinaryMatrix reordered = reorder(g.edge_matrix(), p);
  BinaryMatrix closed =
      partial_close(reordered, detail::head_indices(p.a_size()));
  return PartialAncestorGraph{std::move(p), std::move(closed)};
}

// The three block patterns induced for a split (a, b), all with the
// partition retained:
//   S_aa_given_b - conditional covariance pattern of Y_a given Y_b,
//   P_a_given_b  - coefficient pattern of Y_b in the regression of Y_a,
//   S_bb_dot_a   - marginal concentration pattern of Y_b;
// B is the partial ancestor edge matrix of the split and H the closed
// inner factor both products run through.
struct InducedEdgeMatrices {
  IndexPartition partition;
  BinaryMatrix B;
  BinaryMatrix H;
  BinaryMatrix S_aa_given_b;
  BinaryMatrix P_a_given_b;
  BinaryMatrix S_bb_dot_a;
};

inline InducedEdgeMatrices induced_components(const ParentGraph& g,
                                              const IndexPartition& p) {
  if (p.size() != g.size())
    throw ValidationError("induced_components: partition size mismatch");
  const int da = p.a_size();
  const int db = p.b_size();
  const BinaryMatrix reordered = reorder(g.edge_matrix(), p);
  const BinaryMatrix B = partial_close(reordered, detail::head_indices(da));
  const BinaryMatrix b_aa = B.block(0, da, 0, da);
  const BinaryMatrix b_ab = B.block(0, da, da, db);
  const BinaryMatrix b_ba = B.block(da, db, 0, da);
  const BinaryMatrix b_bb = B.block(da, db, da, db);
  const BinaryMatrix b_ba_t = b_ba.transposed();
  const BinaryMatrix inner =
      from_blocks(BinaryMatrix::identity(da), b_ba_t, b_ba,
                  bool_or(BinaryMatrix::identity(db),
                          b_ba.bool_product(b_ba_t)));
  const BinaryMatrix H =
      partial_close(inner, detail::tail_indices(da, db));
  const BinaryMatrix h_aa = H.block(0, da, 0, da);
  const BinaryMatrix h_ab = H.block(0, da, da, db);
  const BinaryMatrix h_bb = H.block(da, db, da, db);
  BinaryMatrix s_aa =
      b_aa.bool_product(h_aa).bool_product(b_aa.transposed());
  BinaryMatrix p_ab =
      bool_or(b_ab, b_aa.bool_product(h_ab).bool_product(b_bb));
  BinaryMatrix s_bb =
      b_bb.transposed().bool_product(h_bb).bool_product(b_bb);
  return InducedEdgeMatrices{p,
                             B,
                             H,
                             std::move(s_aa),
                             std::move(p_ab),
                             std::move(s_bb)};
}

// Partial inversion of a reordered unit upper triangular matrix on its a
// block, written directly in block form:
//   [ A_aa^-1            -A_aa^-1 A_ab              ]
//   [ A_ba A_aa^-1        A_bb - A_ba A_aa^-1 A_ab  ]
// The a block keeps its ascending order under the split, so it stays
// unit upper triangular and is always invertible; this is still checked.
inline RealMatrix numeric_B(const RealMatrix& a_mat,
                            const IndexPartition& p) {
  if (!a_mat.square() || a_mat.rows() != p.size())
    throw ValidationError("numeric_B: matrix size does not match partition");
  for (int i = 0; i < a_mat.rows(); ++i) {
    if (a_mat(i, i) != 1.0)
      throw ValidationError("numeric_B: matrix must have unit diagonal");
    for (int j = 0; j < i; ++j)
      if (a_mat(i, j) != 0.0)
        throw ValidationError("numeric_B: matrix must be upper triangular");
  }
  const int da = p.a_size();
  const int db = p.b_size();
  const RealMatrix t = reorder(a_mat, p);
  const RealMatrix a_aa = t.block(0, da, 0, da);
  const RealMatrix a_ab = t.block(0, da, da, db);
  const RealMatrix a_ba = t.block(da, db, 0, da);
  const RealMatrix a_bb = t.block(da, db, da, db);
  const RealMatrix a_aa_inv = inverse(a_aa);
  return from_blocks(a_aa_inv, -(a_aa_inv * a_ab), a_ba * a_aa_inv,
                     a_bb - a_ba * a_aa_inv * a_ab);
}

// Numeric blocks of the partially inverted concentration matrix for one
// triangular system and split, in partition order.
struct NumericInducedBlocks {
  IndexPartition partition;
  RealMatrix B;
  RealMatrix H;
  RealMatrix sigma_aa_given_b;
  RealMatrix pi_a_given_b;
  RealMatrix sigma_bb_dot_a;
};

// Computes the blocks along the triangular-system route (through B and
// the residual covariance factor H) and verifies them against partial
// inversion of the concentration matrix. The two routes share no code
// path, so their agreement is a real cross-check; disagreement raises.
inline NumericInducedBlocks numeric_induced_blocks(const TriangularSystem& sys,
                                                   const IndexPartition& p) {
  const int d = sys.size();
  if (p.size() != d)
    throw ValidationError(
        "numeric_induced_blocks: partition size does not match system");
  const int da = p.a_size();
  const int db = p.b_size();
  const RealMatrix B = numeric_B(sys.A, p);
  const RealMatrix b_aa = B.block(0, da, 0, da);
  const RealMatrix b_ab = B.block(0, da, da, db);
  const RealMatrix b_ba = B.block(da, db, 0, da);
  const RealMatrix b_bb = B.block(da, db, da, db);
  RealMatrix delta_aa(da, da);
  for (int i = 0; i < da; ++i)
    delta_aa(i, i) = sys.delta[static_cast<std::size_t>(p.label_at(i) - 1)];
  RealMatrix delta_bb(db, db);
  for (int i = 0; i < db; ++i)
    delta_bb(i, i) =
        sys.delta[static_cast<std::size_t>(p.label_at(da + i) - 1)];
  // Residual covariance of (eps_a, eta_b) with eta_b = eps_b - B_ba eps_a.
  const RealMatrix tau_ab = -(delta_aa * b_ba.transposed());
  const RealMatrix tau =
      from_blocks(delta_aa, tau_ab, tau_ab.transposed(),
                  delta_bb + b_ba * delta_aa * b_ba.transposed());
  const RealMatrix H = partial_invert(tau, detail::tail_indices(da, db));
  const RealMatrix h_aa = H.block(0, da, 0, da);
  const RealMatrix h_ab = H.block(0, da, da, db);
  const RealMatrix h_bb = H.block(da, db, da, db);
  RealMatrix sigma_aa = b_aa * h_aa * b_aa.transposed();
  RealMatrix pi_ab = b_ab + b_aa * h_ab * b_bb;
  RealMatrix sigma_bb = b_bb.transposed() * h_bb * b_bb;
  // Independent route: partially invert the concentration matrix itself.
  const RealMatrix conc = moments(sys).conc;
  const RealMatrix check =
      partial_invert(reorder(conc, p), detail::head_indices(da));
  if (!approx_equal(check.block(0, da, 0, da), sigma_aa,
                    kBlockIdentityTol) ||
      !approx_equal(check.block(0, da, da, db), pi_ab, kBlockIdentityTol) ||
      !approx_equal(check.block(da, db, da, db), sigma_bb,
                    kBlockIdentityTol))
    throw InternalError(
        "numeric_induced_blocks: block routes disagree beyond tolerance");
  return NumericInducedBlocks{p,
                              B,
                              H,
                              std::move(sigma_aa),
                              std::move(pi_ab),
                              std::move(sigma_bb)};
}

// A symmetric or rectangular pattern together with the node labels its
// rows/columns refer to.
struct LabeledPattern {
  NodeList nodes;
  BinaryMatrix mat;

  bool at(int label_i, int label_j) const {
    return mat.get(position(label_i), position(label_j));
  }

  int position(int label) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), label);
    if (it == nodes.end() || *it != label)
      throw ValidationError("pattern: node " + std::to_string(label) +
                            " not present");
    return static_cast<int>(it - nodes.begin());
  }
};

// Pattern of the conditional covariance of the non-conditioned nodes
// g = V \ C given Y_C; symmetric with unit diagonal.
inline LabeledPattern covariance_graph(const ParentGraph& g,
                                       const NodeList& cond) {
  const NodeList c = normalized_nodes(cond, g.size(), "cond");
  const NodeList rest = complement_nodes(g.size(), c);
  if (rest.empty())
    throw ValidationError("covariance_graph: conditioning on every node");
  const IndexPartition p(g.size(), rest);
  InducedEdgeMatrices comp = induced_components(g, p);
  return LabeledPattern{rest, std::move(comp.S_aa_given_b)};
}

// Moral graph of the ancestral closure Q of the seed: keep the subgraph
// induced by Q, join every pair of parents with a common offspring in Q,
// drop directions. Computed as the pattern of A_QQ^T A_QQ.
inline LabeledPattern moral_graph(const ParentGraph& g,
                                  const NodeList& q_seed) {
  if (q_seed.empty()) throw ValidationError("moral_graph: empty seed");
  const NodeList q = g.ancestral_set(q_seed);
  const std::vector<int> pos = label_positions(q);
  const BinaryMatrix a_qq = g.edge_matrix().sub(pos, pos);
  return LabeledPattern{q, a_qq.transposed().bool_product(a_qq)};
}

// Marginal concentration pattern of q = alpha u beta u cond after
// marginalizing over the query margin M. With Z the M-closed edge matrix
// and r the ancestors of q inside M, the pattern is
//   Z_qq^T (closure of I_qq + Z_qr Z_qr^T) Z_qq.
inline LabeledPattern concentration_graph(const ParentGraph& g,
                                          const Query& q) {
  const NodeList qset =
      union_nodes(union_nodes(q.alpha, q.beta), q.cond);
  const NodeList margin = complement_nodes(g.size(), qset);
  const BinaryMatrix z = partial_close(g.edge_matrix(), margin);
  const NodeList r = difference_nodes(g.ancestral_set(qset), qset);
  const std::vector<int> qpos = label_positions(qset);
  const std::vector<int> rpos = label_positions(r);
  const BinaryMatrix z_qq = z.sub(qpos, qpos);
  const BinaryMatrix z_qr = z.sub(qpos, rpos);
  const BinaryMatrix inner = transitive_closure(
      bool_or(BinaryMatrix::identity(static_cast<int>(qset.size())),
              z_qr.bool_product(z_qr.transposed())));
  return LabeledPattern{
      qset, z_qq.transposed().bool_product(inner).bool_product(z_qq)};
}

// Same pattern along the moral-graph route: close the moral graph of
// alpha, beta, cond on the ancestor nodes r and keep the q block. Agrees
// exactly with concentration_graph; kept separate as a cross-check.
inline LabeledPattern concentration_graph_via_moral(const ParentGraph& g,
                                                    const Query& q) {
  const NodeList qset =
      union_nodes(union_nodes(q.alpha, q.beta), q.cond);
  const LabeledPattern moral = moral_graph(g, qset);
  const NodeList r = difference_nodes(moral.nodes, qset);
  std::vector<int> r_idx;  // 1-based positions of r inside Q
  for (int v : r) r_idx.push_back(moral.position(v) + 1);
  const BinaryMatrix closed = partial_close(moral.mat, r_idx);
  std::vector<int> q_idx;
  for (int v : qset) q_idx.push_back(moral.position(v));
  return LabeledPattern{qset, closed.sub(q_idx, q_idx)};
}

// DOT writers. Directed kinds render the edge (i,j) as j -> i, pointing
// at the descendant; undirected kinds use plain graph edges, dashed for
// covariance-style patterns and solid for concentration-style ones.

inline std::string write_dot(const PartialAncestorGraph& pag) {
  std::string out = "digraph partial_ancestor_graph {\n";
  const int d = pag.partition.size();
  for (int p = 0; p < d; ++p)
    out += "  " + std::to_string(pag.partition.label_at(p)) + ";\n";
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j || !pag.edges.get(i, j)) continue;
      out += "  " + std::to_string(pag.partition.label_at(j)) + " -> " +
             std::to_string(pag.partition.label_at(i)) + ";\n";
    }
  out += "}\n";
  return out;
}

inline std::string write_dot_coefficients(const InducedEdgeMatrices& comp) {
  std::string out = "digraph coefficient_graph {\n";
  const IndexPartition& p = comp.partition;
  for (int i = 0; i < p.size(); ++i)
    out += "  " + std::to_string(p.label_at(i)) + ";\n";
  for (int i = 0; i < p.a_size(); ++i)
    for (int j = 0; j < p.b_size(); ++j) {
      if (!comp.P_a_given_b.get(i, j)) continue;
      out += "  " + std::to_string(p.label_at(p.a_size() + j)) + " -> " +
             std::to_string(p.label_at(i)) + ";\n";
    }
  out += "}\n";
  return out;
}

inline std::string write_dot_undirected(const LabeledPattern& pattern,
                                        const std::string& name,
                                        bool dashed) {
  std::string out = "graph " + name + " {\n";
  if (dashed) out += "  edge [style=dashed];\n";
  for (int v : pattern.nodes) out += "  " + std::to_string(v) + ";\n";
  const int n = static_cast<int>(pattern.nodes.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!pattern.mat.get(i, j)) continue;
      out += "  " + std::to_string(pattern.nodes[i]) + " -- " +
             std::to_string(pattern.nodes[j]) + ";\n";
    }
  out += "}\n";
  return out;
}

}  // namespace dagsep

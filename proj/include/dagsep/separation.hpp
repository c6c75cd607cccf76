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
// Deciding whether a query "alpha independent of beta given cond" is
// implied by a parent graph, by six interchangeable routes:
//
//   1. the coefficient block of the induced split (a, b) is zero,
//   2. no active path in the partial ancestor graph,
//   3. d-separation in the parent graph,
//   4. separation in the moral graph of the ancestral closure,
//   5. the conditional covariance pattern block is zero,
//   6. the marginal concentration pattern block is zero.
//
// The routes agree on every query; check_all runs all six and treats a
// disagreement as an internal error. Path searches decide existence by
// reachability over (node, arrival direction) states and produce the
// lexicographically smallest witness path by ordered depth-first search.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/graph.hpp"
#include "dagsep/induced.hpp"
#include "dagsep/matrix.hpp"

namespace dagsep {

// One step of a witness path, read left to right:
//   kBackward: x <- y (arrow toward the earlier node),
//   kForward:  x -> y,
//   kLine:     x -- y (undirected, moral-graph paths).
enum class EdgeMark { kBackward, kForward, kLine };

struct PathWitness {
  std::vector<int> nodes;
  std::vector<EdgeMark> marks;

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i > 0) {
        switch (marks[i - 1]) {
          case EdgeMark::kBackward: out += " <- "; break;
          case EdgeMark::kForward: out += " -> "; break;
          case EdgeMark::kLine: out += " -- "; break;
        }
      }
      out += std::to_string(nodes[i]);
    }
    return out;
  }
};

struct SeparationResult {
  bool separated = false;
  std::optional<PathWitness> witness;  // a connecting path when not separated
};

struct ActivePathResult {
  bool found = false;
  std::optional<PathWitness> witness;
};

namespace detail {

inline std::uint64_t mask_of(const NodeList& labels) {
  std::uint64_t m = 0;
  for (int v : labels) m |= 1ULL << (v - 1);
  return m;
}

inline bool in_mask(std::uint64_t mask, int label) {
  return (mask >> (label - 1)) & 1ULL;
}

// Arrival direction of the last edge at the current node.
enum class Arrival { kHead, kTail };  // arrow into the node / out of it

struct DirectedAdjacency {
  // parents[v]: labels j with an arrow v <- j; children[v]: labels y with
  // an arrow y <- v.
  std::vector<NodeList> parents, children;

  explicit DirectedAdjacency(const BinaryMatrix& edges, int d)
      : parents(static_cast<std::size_t>(d) + 1),
        children(static_cast<std::size_t>(d) + 1) {
    for (int i = 1; i <= d; ++i)
      for (int j = 1; j <= d; ++j) {
        if (i == j || !edges.get(i - 1, j - 1)) continue;
        parents[static_cast<std::size_t>(i)].push_back(j);
        children[static_cast<std::size_t>(j)].push_back(i);
      }
  }
};

}  // namespace detail

// d-separation: true when no path between alpha and beta is d-connecting
// relative to cond, i.e. no path along which every inner collision node
// is in cond or has a descendant there, and every other inner node stays
// outside cond. Existence is decided by reachability over
// (node, arrival direction) states; the witness, when connected, is the
// lexicographically smallest d-connecting node sequence.
inline SeparationResult d_separated(const ParentGraph& g, const Query& q) {
  const int d = g.size();
  const detail::DirectedAdjacency adj(g.edge_matrix(), d);
  const std::uint64_t cond_mask = detail::mask_of(q.cond);
  const std::uint64_t beta_mask = detail::mask_of(q.beta);
  // activatable: in cond or with a descendant in cond. Row w of the
  // closure lists the ancestors of w, so the union over cond rows is
  // exactly the activatable set.
  std::uint64_t activatable = 0;
  {
    const BinaryMatrix closure = g.ancestral_closure();
    for (int w : q.cond) activatable |= closure.row_bits(w - 1);
  }

  const auto connected = [&]() -> bool {
    std::vector<std::array<bool, 2>> seen(static_cast<std::size_t>(d) + 1,
                                          {false, false});
    std::vector<std::pair<int, detail::Arrival>> queue;
    const auto push = [&](int v, detail::Arrival arr) -> bool {
      if (detail::in_mask(beta_mask, v)) return true;
      auto& flag =
          seen[static_cast<std::size_t>(v)][arr == detail::Arrival::kTail];
      if (!flag) {
        flag = true;
        queue.emplace_back(v, arr);
      }
      return false;
    };
    for (int s : q.alpha) {
      for (int j : adj.parents[static_cast<std::size_t>(s)])
        if (push(j, detail::Arrival::kTail)) return true;
      for (int y : adj.children[static_cast<std::size_t>(s)])
        if (push(y, detail::Arrival::kHead)) return true;
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto [v, arr] = queue[head];
      const bool outside_cond = !detail::in_mask(cond_mask, v);
      if (arr == detail::Arrival::kHead) {
        // Continue as a collision (both arrows point at v) or as a
        // transition through v.
        if (detail::in_mask(activatable, v))
          for (int j : adj.parents[static_cast<std::size_t>(v)])
            if (push(j, detail::Arrival::kTail)) return true;
        if (outside_cond)
          for (int y : adj.children[static_cast<std::size_t>(v)])
            if (push(y, detail::Arrival::kHead)) return true;
      } else if (outside_cond) {
        // Source or transition; either way v must avoid cond.
        for (int j : adj.parents[static_cast<std::size_t>(v)])
          if (push(j, detail::Arrival::kTail)) return true;
        for (int y : adj.children[static_cast<std::size_t>(v)])
          if (push(y, detail::Arrival::kHead)) return true;
      }
    }
    return false;
  }();

  if (!connected) return SeparationResult{true, std::nullopt};

  // Lexicographically smallest d-connecting path, by ordered DFS over
  // simple paths. The inner-node rule for x is checked when the path
  // leaves x, once both of its edges are known.
  PathWitness witness;
  std::vector<bool> on_path(static_cast<std::size_t>(d) + 1, false);
  std::vector<int> path;
  std::vector<EdgeMark> marks;
  const std::function<bool(int, std::optional<detail::Arrival>)> extend =
      [&](int x, std::optional<detail::Arrival> arrival) -> bool {
    for (int y = 1; y <= d; ++y) {
      if (on_path[static_cast<std::size_t>(y)] || y == x) continue;
      if (!g.coupled(x, y)) continue;
      const bool edge_into_x = x < y;  // x <- y, else y <- x
      if (arrival.has_value()) {
        if (*arrival == detail::Arrival::kHead && edge_into_x) {
          if (!detail::in_mask(activatable, x)) continue;  // collision
        } else if (detail::in_mask(cond_mask, x)) {
          continue;  // source or transition
        }
      }
      path.push_back(y);
      marks.push_back(edge_into_x ? EdgeMark::kBackward : EdgeMark::kForward);
      if (detail::in_mask(beta_mask, y)) {
        witness.nodes = path;
        witness.marks = marks;
        return true;
      }
      on_path[static_cast<std::size_t>(y)] = true;
      const auto next_arrival =
          edge_into_x ? detail::Arrival::kTail : detail::Arrival::kHead;
      if (extend(y, next_arrival)) return true;
      on_path[static_cast<std::size_t>(y)] = false;
      path.pop_back();
      marks.pop_back();
    }
    return false;
  };
  for (int s : q.alpha) {
    path.assign(1, s);
    marks.clear();
    on_path.assign(static_cast<std::size_t>(d) + 1, false);
    on_path[static_cast<std::size_t>(s)] = true;
    if (extend(s, std::nullopt)) return SeparationResult{false, witness};
  }
  throw InternalError(
      "d_separated: reachability found a connection but no simple path");
}

// Active paths in a partial ancestor graph built with a = V \ (beta u
// cond): a single edge between alpha and beta, or an alternating path
// whose inner source nodes all lie in a and inner collision nodes in b.
inline ActivePathResult active_path_exists(const PartialAncestorGraph& pag,
                                           const Query& q) {
  const int d = pag.partition.size();
  {
    const NodeList expected =
        complement_nodes(d, union_nodes(q.beta, q.cond));
    if (pag.partition.a() != expected)
      throw ValidationError(
          "active_path_exists: ancestor graph split does not match query");
  }
  // Adjacency by labels; edge v <- y iff the (v, y) ancestor entry is set.
  std::vector<NodeList> in_edges(static_cast<std::size_t>(d) + 1);
  std::vector<NodeList> out_edges(static_cast<std::size_t>(d) + 1);
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      if (i == j || !pag.ancestor_edge(i, j)) continue;
      in_edges[static_cast<std::size_t>(i)].push_back(j);
      out_edges[static_cast<std::size_t>(j)].push_back(i);
    }
  const std::uint64_t a_mask = detail::mask_of(pag.partition.a());
  const std::uint64_t b_mask = detail::mask_of(pag.partition.b());
  const std::uint64_t beta_mask = detail::mask_of(q.beta);

  const auto connected = [&]() -> bool {
    std::vector<std::array<bool, 2>> seen(static_cast<std::size_t>(d) + 1,
                                          {false, false});
    std::vector<std::pair<int, detail::Arrival>> queue;
    const auto push = [&](int v, detail::Arrival arr) -> bool {
      if (detail::in_mask(beta_mask, v)) return true;
      auto& flag =
          seen[static_cast<std::size_t>(v)][arr == detail::Arrival::kTail];
      if (!flag) {
        flag = true;
        queue.emplace_back(v, arr);
      }
      return false;
    };
    for (int s : q.alpha) {
      for (int y : in_edges[static_cast<std::size_t>(s)])
        if (push(y, detail::Arrival::kTail)) return true;
      for (int y : out_edges[static_cast<std::size_t>(s)])
        if (push(y, detail::Arrival::kHead)) return true;
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto [v, arr] = queue[head];
      if (arr == detail::Arrival::kHead) {
        // Alternation forces a collision at v.
        if (detail::in_mask(b_mask, v))
          for (int y : in_edges[static_cast<std::size_t>(v)])
            if (push(y, detail::Arrival::kTail)) return true;
      } else {
        // Alternation forces a source at v.
        if (detail::in_mask(a_mask, v))
          for (int y : out_edges[static_cast<std::size_t>(v)])
            if (push(y, detail::Arrival::kHead)) return true;
      }
    }
    return false;
  }();

  if (!connected) return ActivePathResult{false, std::nullopt};

  PathWitness witness;
  std::vector<bool> on_path(static_cast<std::size_t>(d) + 1, false);
  std::vector<int> path;
  std::vector<EdgeMark> marks;
  const std::function<bool(int, std::optional<detail::Arrival>)> extend =
      [&](int x, std::optional<detail::Arrival> arrival) -> bool {
    for (int y = 1; y <= d; ++y) {
      if (on_path[static_cast<std::size_t>(y)] || y == x) continue;
      const bool edge_into_x = pag.ancestor_edge(x, y);
      const bool edge_into_y = pag.ancestor_edge(y, x);
      if (!edge_into_x && !edge_into_y) continue;
      if (arrival.has_value()) {
        // No transitions on an alternating path.
        if (*arrival == detail::Arrival::kHead) {
          if (!edge_into_x || !detail::in_mask(b_mask, x)) continue;
        } else {
          if (!edge_into_y || !detail::in_mask(a_mask, x)) continue;
        }
      }
      // Prefer the orientation the alternation demands; without an
      // arrival constraint at the start node either one works (they
      // cannot both be present in an acyclic closure).
      const bool use_into_x =
          arrival.has_value() ? *arrival == detail::Arrival::kHead
                              : edge_into_x;
      path.push_back(y);
      marks.push_back(use_into_x ? EdgeMark::kBackward : EdgeMark::kForward);
      if (detail::in_mask(beta_mask, y)) {
        witness.nodes = path;
        witness.marks = marks;
        return true;
      }
      on_path[static_cast<std::size_t>(y)] = true;
      const auto next_arrival =
          use_into_x ? detail::Arrival::kTail : detail::Arrival::kHead;
      if (extend(y, next_arrival)) return true;
      on_path[static_cast<std::size_t>(y)] = false;
      path.pop_back();
      marks.pop_back();
    }
    return false;
  };
  for (int s : q.alpha) {
    path.assign(1, s);
    marks.clear();
    on_path.assign(static_cast<std::size_t>(d) + 1, false);
    on_path[static_cast<std::size_t>(s)] = true;
    if (extend(s, std::nullopt)) return ActivePathResult{true, witness};
  }
  throw InternalError(
      "active_path_exists: reachability found a connection but no simple "
      "path");
}

// Separation in the moral graph of the ancestral closure of
// alpha u beta u cond: true when every alpha-to-beta path meets cond.
inline SeparationResult moral_separated(const ParentGraph& g,
                                        const Query& q) {
  const NodeList seed = union_nodes(union_nodes(q.alpha, q.beta), q.cond);
  const LabeledPattern moral = moral_graph(g, seed);
  const int n = static_cast<int>(moral.nodes.size());
  const std::uint64_t beta_mask = detail::mask_of(q.beta);
  const std::uint64_t cond_mask = detail::mask_of(q.cond);

  const auto neighbors = [&](int pos) {
    std::vector<int> out;
    for (int j = 0; j < n; ++j)
      if (j != pos && moral.mat.get(pos, j)) out.push_back(j);
    return out;
  };

  const auto connected = [&]() -> bool {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> queue;
    const auto push = [&](int pos) -> bool {
      const int label = moral.nodes[static_cast<std::size_t>(pos)];
      if (detail::in_mask(beta_mask, label)) return true;
      if (detail::in_mask(cond_mask, label)) return false;
      if (!seen[static_cast<std::size_t>(pos)]) {
        seen[static_cast<std::size_t>(pos)] = true;
        queue.push_back(pos);
      }
      return false;
    };
    for (int s : q.alpha)
      for (int j : neighbors(moral.position(s)))
        if (push(j)) return true;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (int j : neighbors(queue[head]))
        if (push(j)) return true;
    return false;
  }();

  if (!connected) return SeparationResult{true, std::nullopt};

  PathWitness witness;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  std::vector<int> path;
  const std::function<bool(int)> extend = [&](int pos) -> bool {
    for (int j = 0; j < n; ++j) {
      if (j == pos || on_path[static_cast<std::size_t>(j)]) continue;
      if (!moral.mat.get(pos, j)) continue;
      const int label = moral.nodes[static_cast<std::size_t>(j)];
      path.push_back(label);
      if (detail::in_mask(beta_mask, label)) {
        witness.nodes = path;
        witness.marks.assign(path.size() - 1, EdgeMark::kLine);
        return true;
      }
      if (!detail::in_mask(cond_mask, label)) {
        on_path[static_cast<std::size_t>(j)] = true;
        if (extend(j)) return true;
        on_path[static_cast<std::size_t>(j)] = false;
      }
      path.pop_back();
    }
    return false;
  };
  for (int s : q.alpha) {
    const int pos = moral.position(s);
    path.assign(1, s);
    on_path.assign(static_cast<std::size_t>(n), false);
    on_path[static_cast<std::size_t>(pos)] = true;
    if (extend(pos)) return SeparationResult{false, witness};
  }
  throw InternalError(
      "moral_separated: reachability found a connection but no simple path");
}

// The coefficient-block route: split the nodes into a = V \ (beta u
// cond) and b = beta u cond; the query is implied exactly when the
// (alpha, beta) block of the induced coefficient pattern is zero.
inline bool matrix_criterion(const ParentGraph& g, const Query& q) {
  const NodeList b = union_nodes(q.beta, q.cond);
  const IndexPartition p(g.size(), complement_nodes(g.size(), b));
  const InducedEdgeMatrices comp = induced_components(g, p);
  const int da = p.a_size();
  for (int x : q.alpha)
    for (int y : q.beta)
      if (comp.P_a_given_b.get(p.position_of(x), p.position_of(y) - da))
        return false;
  return true;
}

// Covariance-pattern route: the (alpha, beta) block of the conditional
// covariance pattern given cond is zero.
inline bool covariance_block_zero(const ParentGraph& g, const Query& q) {
  const LabeledPattern cov = covariance_graph(g, q.cond);
  for (int x : q.alpha)
    for (int y : q.beta)
      if (cov.at(x, y)) return false;
  return true;
}

// Concentration-pattern route: the (alpha, beta) block of the marginal
// concentration pattern is zero.
inline bool concentration_block_zero(const ParentGraph& g, const Query& q) {
  const LabeledPattern conc = concentration_graph(g, q);
  for (int x : q.alpha)
    for (int y : q.beta)
      if (conc.at(x, y)) return false;
  return true;
}

inline constexpr std::array<const char*, 6> kRouteNames = {
    "coefficient-block", "active-path",      "d-separation",
    "moral-separation",  "covariance-block", "concentration-block"};

// All six route verdicts, each true when that route implies the query.
inline std::array<bool, 6> route_verdicts(const ParentGraph& g,
                                          const Query& q) {
  std::array<bool, 6> out{};
  out[0] = matrix_criterion(g, q);
  const PartialAncestorGraph pag = partial_ancestor_graph(
      g, complement_nodes(g.size(), union_nodes(q.beta, q.cond)));
  out[1] = !active_path_exists(pag, q).found;
  out[2] = d_separated(g, q).separated;
  out[3] = moral_separated(g, q).separated;
  out[4] = covariance_block_zero(g, q);
  out[5] = concentration_block_zero(g, q);
  return out;
}

struct Verdict {
  bool implied = false;
  std::vector<std::pair<std::string, bool>> per_route;
  std::optional<PathWitness> witness;  // set when not implied
};

// Runs every route and returns the common answer. A coupled alpha-beta
// pair defeats every criterion outright, so it short-circuits with the
// edge itself as witness. Any disagreement between routes is a bug in
// this library and raises.
inline Verdict check_all(const ParentGraph& g, const Query& q_in) {
  const Query q = make_query(g, q_in.alpha, q_in.beta, q_in.cond);
  Verdict verdict;
  for (int x : q.alpha)
    for (int y : q.beta) {
      if (!g.coupled(x, y)) continue;
      verdict.implied = false;
      for (const char* name : kRouteNames)
        verdict.per_route.emplace_back(name, false);
      PathWitness w;
      w.nodes = {x, y};
      w.marks = {x < y ? EdgeMark::kBackward : EdgeMark::kForward};
      verdict.witness = std::move(w);
      return verdict;
    }
  const std::array<bool, 6> routes = route_verdicts(g, q);
  for (std::size_t i = 0; i < routes.size(); ++i)
    verdict.per_route.emplace_back(kRouteNames[i], routes[i]);
  for (bool r : routes)
    if (r != routes[0]) {
      std::string detail = "route disagreement on query:";
      for (std::size_t i = 0; i < routes.size(); ++i)
        detail += std::string(" ") + kRouteNames[i] + "=" +
                  (routes[i] ? "1" : "0");
      throw InternalError(detail);
    }
  verdict.implied = routes[0];
  if (!verdict.implied) verdict.witness = d_separated(g, q).witness;
  return verdict;
}

}  // namespace dagsep

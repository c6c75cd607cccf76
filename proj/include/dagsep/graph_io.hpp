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
// Graph text format (UTF-8, line oriented):
//
//   # comment
//   d 4
//   1 2
//   2 3
//
// The first non-comment line declares the node count; every following
// line `i j` declares the arrow i <- j with i < j. `#` starts a comment
// anywhere on a line.

#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dagsep/error.hpp"
#include "dagsep/graph.hpp"

namespace dagsep {

namespace detail {

inline std::vector<std::string> content_tokens(const std::string& raw) {
  std::string line = raw;
  if (const auto pos = line.find('#'); pos != std::string::npos)
    line.erase(pos);
  std::istringstream in(line);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

inline int parse_int(const std::string& tok, int lineno) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(lineno, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size())
    throw ParseError(lineno, "expected an integer, got '" + tok + "'");
  return value;
}

}  // namespace detail

inline ParentGraph read_graph_text(std::istream& in) {
  int lineno = 0;
  bool have_d = false;
  int d = 0;
  std::vector<std::pair<int, int>> arrows;
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto tokens = detail::content_tokens(raw);
    if (tokens.empty()) continue;
    if (!have_d) {
      if (tokens.size() != 2 || tokens[0] != "d")
        throw ParseError(lineno, "expected header 'd <node count>'");
      d = detail::parse_int(tokens[1], lineno);
      if (d < 1) throw ParseError(lineno, "node count must be at least 1");
      if (d > kMaxNodes)
        throw ParseError(lineno, "node count exceeds the supported maximum " +
                                     std::to_string(kMaxNodes));
      have_d = true;
      continue;
    }
    if (tokens.size() != 2)
      throw ParseError(lineno, "expected an arrow line 'i j'");
    const int i = detail::parse_int(tokens[0], lineno);
    const int j = detail::parse_int(tokens[1], lineno);
    if (i < 1 || i > d || j < 1 || j > d)
      throw ParseError(lineno, "arrow (" + std::to_string(i) + "," +
                                   std::to_string(j) + ") out of range 1.." +
                                   std::to_string(d));
    if (i >= j)
      throw ParseError(lineno,
                       "arrow (" + std::to_string(i) + "," +
                           std::to_string(j) +
                           ") violates the node order (needs i < j)");
    for (const auto& seen : arrows)
      if (seen.first == i && seen.second == j)
        throw ParseError(lineno, "duplicate arrow (" + std::to_string(i) +
                                     "," + std::to_string(j) + ")");
    arrows.emplace_back(i, j);
  }
  if (!have_d) throw ParseError(0, "missing header 'd <node count>'");
  return ParentGraph(d, arrows);
}

inline ParentGraph read_graph_string(const std::string& text) {
  std::istringstream in(text);
  return read_graph_text(in);
}

inline ParentGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open graph file '" + path + "'");
  return read_graph_text(in);
}

inline std::string write_graph_text(const ParentGraph& g) {
  std::string out = "d " + std::to_string(g.size()) + "\n";
  for (const auto& [i, j] : g.arrows())
    out += std::to_string(i) + " " + std::to_string(j) + "\n";
  return out;
}

// DOT export; the arrow i <- j is rendered as j -> i.
inline std::string write_graph_dot(const ParentGraph& g) {
  std::string out = "digraph parent_graph {\n";
  for (int v = 1; v <= g.size(); ++v)
    out += "  " + std::to_string(v) + ";\n";
  for (const auto& [i, j] : g.arrows())
    out += "  " + std::to_string(j) + " -> " + std::to_string(i) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace dagsep

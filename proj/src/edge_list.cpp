#include "simplexi/edge_list.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>

#include "simplexi/random.hpp"

namespace simplexi {

namespace {

struct RawEdges {
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;
  std::vector<std::int64_t> ids;
};

RawEdges read_edges(std::istream& in) {
  RawEdges raw;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::int64_t u = 0;
    std::int64_t v = 0;
    std::string extra;
    if (!(fields >> u >> v) || (fields >> extra))
      throw ParseError("edge list line " + std::to_string(line_no) + ": expected two integers, got '" +
                       line + "'");
    if (u < 0 || v < 0)
      throw ParseError("edge list line " + std::to_string(line_no) + ": negative node id");
    raw.edges.emplace_back(u, v);
  }
  if (raw.edges.empty()) throw ParseError("edge list contains no edges (no nodes)");
  raw.ids.reserve(raw.edges.size() * 2);
  for (const auto& [u, v] : raw.edges) {
    raw.ids.push_back(u);
    raw.ids.push_back(v);
  }
  std::sort(raw.ids.begin(), raw.ids.end());
  raw.ids.erase(std::unique(raw.ids.begin(), raw.ids.end()), raw.ids.end());
  return raw;
}

SparseColMatrix binarize(const std::vector<Triplet>& triplets, Index rows, Index cols) {
  SparseColMatrix summed = build_csc(triplets, rows, cols);
  std::vector<double> ones(static_cast<std::size_t>(summed.nnz()), 1.0);
  return SparseColMatrix::from_csc(rows, cols, {summed.col_ptr().begin(), summed.col_ptr().end()},
                                   {summed.row_idx().begin(), summed.row_idx().end()},
                                   std::move(ones));
}

}  // namespace

EdgeListGraph parse_edge_list(std::istream& in, const EdgeListMode& mode) {
  RawEdges raw = read_edges(in);
  EdgeListGraph graph;
  graph.node_count = static_cast<Index>(raw.ids.size());
  graph.edge_count = static_cast<Index>(raw.edges.size());

  std::unordered_map<std::int64_t, Index> dense;
  dense.reserve(raw.ids.size());
  for (std::size_t i = 0; i < raw.ids.size(); ++i) dense.emplace(raw.ids[i], static_cast<Index>(i));

  std::vector<Triplet> triplets;
  if (std::holds_alternative<SquareMode>(mode)) {
    triplets.reserve(raw.edges.size() * 2);
    for (const auto& [u, v] : raw.edges) {
      const Index a = dense.at(u);
      const Index b = dense.at(v);
      triplets.push_back({a, b, 1.0});
      if (a != b) triplets.push_back({b, a, 1.0});
    }
    graph.adjacency = binarize(triplets, graph.node_count, graph.node_count);
  } else {
    const auto& bip = std::get<BipartiteMode>(mode);
    if (bip.rows < 1 || bip.cols < 1)
      throw ParameterError("bipartite split needs at least one row-node and one column-node");
    if (bip.rows + bip.cols > graph.node_count)
      throw ParameterError("bipartite split needs " + std::to_string(bip.rows + bip.cols) +
                           " nodes but the edge list has " + std::to_string(graph.node_count));
    std::vector<Index> perm(raw.ids.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    Rng rng = make_rng(bip.seed, 0xB1);
    std::shuffle(perm.begin(), perm.end(), rng);
    // side[i] >= 0: row index; side[i] <= -2: column index -(side+2); -1: unused.
    std::vector<Index> side(raw.ids.size(), -1);
    for (Index r = 0; r < bip.rows; ++r) side[perm[r]] = r;
    for (Index c = 0; c < bip.cols; ++c) side[perm[bip.rows + c]] = -(c + 2);
    for (const auto& [u, v] : raw.edges) {
      const Index su = side[dense.at(u)];
      const Index sv = side[dense.at(v)];
      if (su >= 0 && sv <= -2) triplets.push_back({su, -(sv + 2), 1.0});
      if (sv >= 0 && su <= -2) triplets.push_back({sv, -(su + 2), 1.0});
    }
    graph.adjacency = binarize(triplets, bip.rows, bip.cols);
  }
  graph.node_ids = std::move(raw.ids);
  return graph;
}

}  // namespace simplexi

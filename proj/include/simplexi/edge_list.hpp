#pragma once

#include <cstdint>
#include <istream>
#include <variant>
#include <vector>

#include "simplexi/sparse_matrix.hpp"

namespace simplexi {

struct SquareMode {};

/// Random split of the node set: the first `rows` nodes of a seeded shuffle
/// become row-nodes, the next `cols` become column-nodes.
struct BipartiteMode {
  Index rows = 0;
  Index cols = 0;
  std::uint64_t seed = 0;
};

using EdgeListMode = std::variant<SquareMode, BipartiteMode>;

struct EdgeListGraph {
  SparseColMatrix adjacency;  // 0/1 entries
  Index node_count = 0;       // distinct ids observed
  Index edge_count = 0;       // edge lines read
  std::vector<std::int64_t> node_ids;  // dense index -> original id, ascending
};

/// Reads a SNAP-style edge list: one "u v" pair per line, '#' comments,
/// blank lines ignored. Square mode builds the symmetric adjacency over the
/// densely remapped node ids.
EdgeListGraph parse_edge_list(std::istream& in, const EdgeListMode& mode);

}  // namespace simplexi

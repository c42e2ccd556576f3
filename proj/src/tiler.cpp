#include "regraphx/tiler.hpp"

#include <algorithm>
#include <utility>

namespace regraphx {

namespace {

struct Entry {
  std::size_t block_row, block_col, row, col;
  auto key() const { return std::pair{block_row, block_col}; }
};

void check_tile_size(std::size_t M) {
  if (M == 0) throw InvalidArgument("tile size M must be >= 1");
}

// Every nonzero (r, c) of the symmetric adjacency, sorted by block then cell.
std::vector<Entry> adjacency_entries(const Graph& g, std::size_t M, bool self_loops) {
  std::vector<Entry> entries;
  entries.reserve(g.adjacency_nnz() + (self_loops ? g.num_nodes() : 0));
  auto add = [&](std::size_t r, std::size_t c) { entries.push_back({r / M, c / M, r % M, c % M}); };
  for (const auto& e : g.edges()) {
    add(e.u, e.v);
    if (e.u != e.v) add(e.v, e.u);
  }
  if (self_loops) {
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      if (!g.has_edge(i, i)) add(i, i);
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.block_row, a.block_col, a.row, a.col) < std::tie(b.block_row, b.block_col, b.row, b.col);
  });
  return entries;
}

}  // namespace

std::size_t TileGrid::nnz() const {
  std::size_t total = 0;
  for (const auto& t : tiles) total += t.nnz;
  return total;
}

TileGrid tile_adjacency(const Graph& g, std::size_t M, bool self_loops) {
  check_tile_size(M);
  TileGrid grid;
  grid.n = g.num_nodes();
  grid.M = M;
  grid.grid_dim = (grid.n + M - 1) / M;
  const auto m = static_cast<Eigen::Index>(M);
  for (const auto& e : adjacency_entries(g, M, self_loops)) {
    if (grid.tiles.empty() || std::pair{grid.tiles.back().block_row, grid.tiles.back().block_col} != e.key()) {
      grid.tiles.push_back({e.block_row, e.block_col, TilePattern::Zero(m, m), 0});
    }
    auto& t = grid.tiles.back();
    t.pattern(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = 1;
    ++t.nnz;
  }
  return grid;
}

ZeroStats zero_stats(const TileGrid& grid) {
  ZeroStats s;
  s.M = grid.M;
  s.nonempty_tiles = grid.tiles.size();
  s.nnz = grid.nnz();
  s.stored_zeros = s.nonempty_tiles * grid.M * grid.M - s.nnz;
  return s;
}

ZeroStats count_zero_stats(const Graph& g, std::size_t M, bool self_loops) {
  check_tile_size(M);
  const auto entries = adjacency_entries(g, M, self_loops);
  ZeroStats s;
  s.M = M;
  s.nnz = entries.size();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].key() != entries[i - 1].key()) ++s.nonempty_tiles;
  }
  s.stored_zeros = s.nonempty_tiles * M * M - s.nnz;
  return s;
}

std::size_t epe_requirement(std::size_t nonempty_tiles, const TileSpec& spec,
                            std::size_t value_bits_stored) {
  const std::size_t crossbars = nonempty_tiles * bit_slices(value_bits_stored, spec.cell_bits);
  return (crossbars + spec.capacity() - 1) / spec.capacity();
}

std::size_t epe_requirement(const TileGrid& grid, const TileSpec& spec, std::size_t value_bits_stored) {
  if (spec.crossbar_size != grid.M) {
    throw InvalidArgument("E-PE crossbar size " + std::to_string(spec.crossbar_size) +
                          " does not match tile size " + std::to_string(grid.M));
  }
  return epe_requirement(grid.tiles.size(), spec, value_bits_stored);
}

}  // namespace regraphx

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "regraphx/error.hpp"
#include "regraphx/graph.hpp"
#include "regraphx/hw_model.hpp"

namespace regraphx {

using TilePattern = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One retained M x M block of the adjacency matrix.
struct Tile {
  std::size_t block_row = 0;
  std::size_t block_col = 0;
  TilePattern pattern;
  std::size_t nnz = 0;
};

/// Nonempty M x M blocks of an n x n binary adjacency matrix, row-major by
/// (block_row, block_col). The last block row/column is zero padded when M
/// does not divide n.
struct TileGrid {
  std::size_t n = 0;
  std::size_t M = 0;
  std::size_t grid_dim = 0;
  std::vector<Tile> tiles;

  std::size_t nnz() const;
};

struct ZeroStats {
  std::size_t M = 0;
  std::size_t nonempty_tiles = 0;
  std::size_t stored_zeros = 0;
  std::size_t nnz = 0;
};

TileGrid tile_adjacency(const Graph& g, std::size_t M, bool self_loops);

ZeroStats zero_stats(const TileGrid& grid);

/// Same numbers as zero_stats(tile_adjacency(g, M, self_loops)) without
/// materializing tile patterns; used for large sweeps.
ZeroStats count_zero_stats(const Graph& g, std::size_t M, bool self_loops);

/// E-PEs needed to hold the grid: ceil(tiles * replication / capacity) with
/// replication = bit_slices(value_bits_stored, cell_bits).
std::size_t epe_requirement(const TileGrid& grid, const TileSpec& spec,
                            std::size_t value_bits_stored = 1);
std::size_t epe_requirement(std::size_t nonempty_tiles, const TileSpec& spec,
                            std::size_t value_bits_stored = 1);

/// Dense adjacency rebuilt from the grid (absent blocks are zero).
template <typename Scalar = int>
DenseMatrix<Scalar> reconstruct_dense(const TileGrid& grid) {
  const auto padded = static_cast<Eigen::Index>(grid.grid_dim * grid.M);
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(padded, padded);
  const auto m = static_cast<Eigen::Index>(grid.M);
  for (const auto& t : grid.tiles) {
    out.block(static_cast<Eigen::Index>(t.block_row) * m, static_cast<Eigen::Index>(t.block_col) * m, m, m) =
        t.pattern.template cast<Scalar>().matrix();
  }
  const auto n = static_cast<Eigen::Index>(grid.n);
  return out.topLeftCorner(n, n);
}

/// Adj * X computed block-by-block over the retained tiles, as the E-PE
/// crossbars would: each tile multiplies its M-row slice of the padded
/// input and accumulates into its block row.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> tiled_spmv(const TileGrid& grid,
                                                 const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (static_cast<std::size_t>(X.rows()) != grid.n) {
    throw InvalidArgument("tiled_spmv: X has " + std::to_string(X.rows()) + " rows, grid order is " +
                          std::to_string(grid.n));
  }
  const auto n = static_cast<Eigen::Index>(grid.n);
  const auto d = X.cols();
  const auto m = static_cast<Eigen::Index>(grid.M);
  const auto padded = static_cast<Eigen::Index>(grid.grid_dim * grid.M);

  DenseMatrix<Scalar> xpad = DenseMatrix<Scalar>::Zero(padded, d);
  xpad.topRows(n) = X;
  DenseMatrix<Scalar> ypad = DenseMatrix<Scalar>::Zero(padded, d);
  for (const auto& t : grid.tiles) {
    const auto r0 = static_cast<Eigen::Index>(t.block_row) * m;
    const auto c0 = static_cast<Eigen::Index>(t.block_col) * m;
    ypad.middleRows(r0, m).noalias() += t.pattern.template cast<Scalar>().matrix() * xpad.middleRows(c0, m);
  }
  return ypad.topRows(n);
}

}  // namespace regraphx

#include <doctest.h>

#include "oracles.hpp"
#include "regraphx/rng.hpp"
#include "regraphx/tiler.hpp"

using namespace regraphx;

namespace {

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  SyntheticParams params;
  params.edge_prob = p;
  return generate_synthetic(SyntheticKind::Random, n, params, seed);
}

}  // namespace

TEST_CASE("tile examples") {
  const Graph empty8(8, {});
  const TileGrid id = tile_adjacency(empty8, 8, true);
  REQUIRE(id.tiles.size() == 1);
  CHECK(id.tiles[0].nnz == 8);
  CHECK(zero_stats(id).stored_zeros == 56);
  CHECK(zero_stats(tile_adjacency(empty8, 2, true)).stored_zeros == 8);
  CHECK(tile_adjacency(empty8, 2, true).tiles.size() == 4);
  CHECK(tile_adjacency(empty8, 8, false).tiles.empty());

  // nonzeros at (0,1) and (3,2) and their mirrors
  const Graph g(4, {{0, 1}, {2, 3}});
  const TileGrid grid = tile_adjacency(g, 2, false);
  REQUIRE(grid.tiles.size() == 2);
  CHECK(grid.tiles[0].block_row == 0);
  CHECK(grid.tiles[0].block_col == 0);
  CHECK(grid.tiles[1].block_row == 1);
  CHECK(grid.tiles[1].block_col == 1);
  CHECK(grid.tiles[1].pattern(1, 0) == 1);
  CHECK(grid.tiles[1].pattern(0, 1) == 1);
  CHECK(grid.tiles[1].pattern(0, 0) == 0);

  CHECK_THROWS_AS(tile_adjacency(g, 0, false), InvalidArgument);
  CHECK_THROWS_AS(count_zero_stats(g, 0, false), InvalidArgument);
}

TEST_CASE("self-loop option does not double existing diagonal") {
  const Graph looped = with_self_loops(Graph(5, {{0, 1}}));
  const TileGrid a = tile_adjacency(looped, 4, true);
  const TileGrid b = tile_adjacency(looped, 4, false);
  CHECK(a.nnz() == b.nnz());
  CHECK(a.nnz() == 7);
}

TEST_CASE("grid invariants against a dense oracle") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + uniform_below(rng, 90);
    const double p = 0.01 + 0.3 * uniform01(rng);
    const bool loops = seed % 3 == 0;
    const Graph g = random_graph(n, p, seed);
    const auto dense = oracle::dense_adjacency(g, loops);
    for (std::size_t M : {1, 2, 3, 8, 16, 128}) {
      const TileGrid grid = tile_adjacency(g, M, loops);
      CHECK(grid.grid_dim == (n + M - 1) / M);
      CHECK(grid.nnz() == static_cast<std::size_t>(dense.sum()));
      for (std::size_t i = 0; i < grid.tiles.size(); ++i) {
        const auto& t = grid.tiles[i];
        CHECK(t.nnz >= 1);
        CHECK(t.nnz == static_cast<std::size_t>(t.pattern.cast<int>().sum()));
        CHECK(t.block_row < grid.grid_dim);
        CHECK(t.block_col < grid.grid_dim);
        if (i > 0) {
          const auto& q = grid.tiles[i - 1];
          CHECK(std::pair{q.block_row, q.block_col} < std::pair{t.block_row, t.block_col});
        }
      }
      const ZeroStats z = zero_stats(grid);
      const auto dz = oracle::dense_zero_count(dense, M);
      CHECK(z.nonempty_tiles == dz.tiles);
      CHECK(z.stored_zeros == dz.zeros);
      CHECK(z.stored_zeros == z.nonempty_tiles * M * M - z.nnz);
      const ZeroStats c = count_zero_stats(g, M, loops);
      CHECK(c.nonempty_tiles == z.nonempty_tiles);
      CHECK(c.stored_zeros == z.stored_zeros);
      CHECK(c.nnz == z.nnz);
      CHECK((reconstruct_dense<long long>(grid) == dense));
    }
  }
}

TEST_CASE("padding zeros are stored zeros") {
  // one edge in a 3-node graph, M = 4: one block of 16 cells, 2 nonzeros
  const ZeroStats z = count_zero_stats(Graph(3, {{0, 2}}), 4, false);
  CHECK(z.nonempty_tiles == 1);
  CHECK(z.stored_zeros == 14);
}

TEST_CASE("zero monotonicity under nesting") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const Graph g = random_graph(256, 0.005 + 0.1 * uniform01(rng), seed);
    const auto z8 = count_zero_stats(g, 8, false).stored_zeros;
    const auto z16 = count_zero_stats(g, 16, false).stored_zeros;
    const auto z128 = count_zero_stats(g, 128, false).stored_zeros;
    CHECK(z16 >= z8);
    CHECK(z128 >= z16);
  }
}

TEST_CASE("tiled SpMV") {
  SUBCASE("identity and empty") {
    const Graph empty(10, {});
    DenseMatrix<int> X = DenseMatrix<int>::Random(10, 3);
    CHECK((tiled_spmv(tile_adjacency(empty, 4, true), X) == X));
    CHECK(tiled_spmv(tile_adjacency(empty, 4, false), X).isZero());
  }
  SUBCASE("random instances equal the dense product") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      const Graph g = random_graph(64, 0.02 + 0.2 * uniform01(rng), seed);
      oracle::IntMatrix X(64, 5);
      for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = static_cast<long long>(uniform_below(rng, 17)) - 8;
      const auto dense = oracle::dense_adjacency(g, false);
      for (std::size_t M : {8, 7, 64, 100}) {
        const auto y = tiled_spmv(tile_adjacency(g, M, false), X);
        CHECK((y == dense * X));
      }
    }
  }
  SUBCASE("row mismatch") {
    const TileGrid grid = tile_adjacency(Graph(4, {{0, 1}}), 2, false);
    DenseMatrix<int> X = DenseMatrix<int>::Ones(5, 2);
    CHECK_THROWS_AS(tiled_spmv(grid, X), InvalidArgument);
  }
}

TEST_CASE("E-PE requirement") {
  const TileSpec spec = TileSpec::epe_default();
  CHECK(epe_requirement(0, spec) == 0);
  CHECK(epe_requirement(96, spec) == 1);
  CHECK(epe_requirement(97, spec) == 2);
  CHECK(epe_requirement(96, spec, 16) == 8);
  const TileGrid grid = tile_adjacency(Graph(16, {{0, 9}}), 8, false);
  CHECK(epe_requirement(grid, spec) == 1);
  TileSpec wrong = spec;
  wrong.crossbar_size = 128;
  CHECK_THROWS_AS(epe_requirement(grid, wrong), InvalidArgument);
}

#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "regraphx/error.hpp"
#include "regraphx/graph.hpp"
#include "regraphx/rng.hpp"

using namespace regraphx;

namespace {

Graph parse(const std::string& text, LoadOptions opt = {}) {
  std::istringstream in(text);
  return parse_edge_list(in, opt);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph(n, edges);
}

Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  SyntheticParams params;
  params.edge_prob = p;
  return generate_synthetic(SyntheticKind::Random, n, params, seed);
}

}  // namespace

TEST_CASE("edge list basics") {
  const Graph g = parse("0 1\n1 2\n");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("duplicate and reversed lines collapse") {
  const Graph g = parse("0 1\n1 0\n0 1\n");
  CHECK(g.num_edges() == 1);
  CHECK(g.meta().duplicate_edges_dropped == 2);
}

TEST_CASE("comments, header and self-loop lines") {
  const Graph g = parse("# a comment\nnodes=10\n0 1\n\n  3\t4  \n5 5\n# trailing\n");
  CHECK(g.num_nodes() == 10);
  CHECK(g.num_edges() == 2);
  CHECK(g.num_self_loops() == 0);
  CHECK(g.meta().self_loops_dropped == 1);
  CHECK(g.meta().components == 8);

  const Graph looped = parse("0 1\n", {true, 16});
  CHECK(looped.num_self_loops() == 2);
  CHECK(looped.feature_dim() == 16);
  CHECK(looped.adjacency_nnz() == 4);
}

TEST_CASE("parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("0 1\n1 x\n") == 2);
  CHECK(line_of("0 1\n\n1 2 3\n") == 3);
  CHECK(line_of("0 -1\n") == 1);
  CHECK(line_of("7\n") == 1);
  CHECK(line_of("0 99999999999999999999\n") == 1);
  CHECK(line_of("0 4294967295\n") == 1);
  CHECK(line_of("nodes=3\n0 1\n2 3\n") == 3);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("# only comments\n"), ParseError);
}

TEST_CASE("canonical text round trip") {
  const Graph g = random_graph(40, 0.1, 3);
  const Graph back = parse(to_edge_list(g));
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(std::equal(back.edges().begin(), back.edges().end(), g.edges().begin(), g.edges().end()));
}

TEST_CASE("graph invariants") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = random_graph(30, 0.2, seed);
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
      const auto& e = g.edges()[i];
      CHECK(e.u < e.v);
      CHECK(e.v < g.num_nodes());
      if (i > 0) CHECK(g.edges()[i - 1] < e);
    }
    std::size_t deg_sum = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) deg_sum += g.degree(u);
    CHECK(deg_sum == 2 * g.num_edges());
  }
  CHECK_THROWS_AS(Graph(2, {{0, 2}}), InvalidArgument);
}

TEST_CASE("synthetic generators") {
  SUBCASE("grid") {
    CHECK(generate_synthetic(SyntheticKind::Grid, 9, {}, 1).num_edges() == 12);
    SyntheticParams p;
    p.grid_width = 4;
    const Graph g = generate_synthetic(SyntheticKind::Grid, 12, p, 1);
    CHECK(g.num_edges() == 3 * 3 + 2 * 4);
    CHECK(g.meta().components == 1);
    p.grid_width = 5;
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::Grid, 12, p, 1), InvalidArgument);
  }
  SUBCASE("random") {
    CHECK(random_graph(100, 0.0, 1).num_edges() == 0);
    CHECK(random_graph(10, 1.0, 1).num_edges() == 45);
    const Graph g = random_graph(400, 0.05, 9);
    const double expected = 0.05 * 400 * 399 / 2;
    CHECK(std::abs(static_cast<double>(g.num_edges()) - expected) < 5 * std::sqrt(expected));
  }
  SUBCASE("power law is deterministic and heavy tailed") {
    const Graph a = generate_synthetic(SyntheticKind::PowerLaw, 1000, {}, 42);
    const Graph b = generate_synthetic(SyntheticKind::PowerLaw, 1000, {}, 42);
    CHECK(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end()));
    CHECK(to_edge_list(a) == to_edge_list(b));
    const Graph c = generate_synthetic(SyntheticKind::PowerLaw, 1000, {}, 43);
    CHECK(to_edge_list(a) != to_edge_list(c));

    // random graph with the same edge count
    const double p = static_cast<double>(a.num_edges()) / (1000.0 * 999.0 / 2.0);
    const Graph r = random_graph(1000, p, 42);
    auto max_degree = [](const Graph& g) {
      std::size_t m = 0;
      for (NodeId u = 0; u < g.num_nodes(); ++u) m = std::max(m, g.degree(u));
      return m;
    };
    auto count_above = [](const Graph& g, std::size_t k) {
      std::size_t c = 0;
      for (NodeId u = 0; u < g.num_nodes(); ++u) c += g.degree(u) > k;
      return c;
    };
    CHECK(max_degree(a) > 3 * max_degree(r));
    CHECK(count_above(a, 30) > count_above(r, 30));
  }
  SUBCASE("invalid parameters") {
    SyntheticParams p;
    p.exponent = 1.0;
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::PowerLaw, 10, p, 1), InvalidArgument);
    p = {};
    p.edge_prob = 1.5;
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::Random, 10, p, 1), InvalidArgument);
    CHECK_THROWS_AS(generate_synthetic(SyntheticKind::Grid, 0, {}, 1), InvalidArgument);
    CHECK_THROWS(synthetic_kind_from_string("lattice"));
  }
}

TEST_CASE("partition examples") {
  const Graph g = random_graph(50, 0.1, 5);
  const PartitionSet one = partition(g, 1, 7);
  REQUIRE(one.num_parts() == 1);
  CHECK(one.parts[0].size() == 50);

  const PartitionSet singles = partition(g, 50, 7);
  CHECK(singles.num_parts() == 50);
  for (const auto& p : singles.parts) CHECK(p.size() == 1);

  const Graph path = path_graph(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PartitionSet ps = partition(path, 2, seed);
    CHECK(edge_cut(path, ps) == 1);
    for (const auto& p : ps.parts) {
      CHECK(p.size() == 3);
      CHECK(p.back() - p.front() == 2);
    }
  }
  CHECK_THROWS_AS(partition(g, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(partition(g, 51, 1), InvalidArgument);
}

TEST_CASE("partition property: cover, balance, determinism") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng(seed);
    const std::size_t n = 20 + uniform_below(rng, 300);
    const std::size_t k = 1 + uniform_below(rng, 20);
    const Graph g = generate_synthetic(seed % 2 ? SyntheticKind::PowerLaw : SyntheticKind::Random, n, {}, seed);
    const PartitionSet ps = partition(g, k, seed);
    CHECK_NOTHROW(validate_partition(ps, n));
    const double ideal = static_cast<double>(n) / static_cast<double>(k);
    for (const auto& p : ps.parts) {
      CHECK(p.size() >= std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.9 * ideal))));
      CHECK(p.size() <= static_cast<std::size_t>(std::ceil(1.1 * ideal)));
    }
    const PartitionSet again = partition(g, k, seed);
    CHECK(again.parts == ps.parts);

    GreedyBfsPartitioner::Options raw;
    raw.refine = false;
    const PartitionSet grown = GreedyBfsPartitioner(raw).partition(g, k, seed);
    for (const auto& p : grown.parts) {
      CHECK(p.size() >= n / k);
      CHECK(p.size() <= (n + k - 1) / k);
    }
  }
}

TEST_CASE("partition beats random assignment on locality") {
  const Graph g = generate_synthetic(SyntheticKind::Grid, 400, {}, 1);
  const PartitionSet ps = partition(g, 8, 3);
  PartitionSet random;
  random.parts.resize(8);
  std::vector<NodeId> ids(400);
  for (NodeId i = 0; i < 400; ++i) ids[i] = i;
  Rng rng(3);
  shuffle(ids.begin(), ids.end(), rng);
  for (std::size_t i = 0; i < ids.size(); ++i) random.parts[i % 8].push_back(ids[i]);
  for (auto& p : random.parts) std::sort(p.begin(), p.end());
  CHECK(edge_cut(g, ps) * 4 < edge_cut(g, random));
}

TEST_CASE("validate_partition rejects bad covers") {
  PartitionSet ps;
  ps.parts = {{0, 1}, {1, 2}};
  CHECK_THROWS_AS(validate_partition(ps, 3), InvalidArgument);
  ps.parts = {{0, 1}, {}};
  CHECK_THROWS_AS(validate_partition(ps, 2), InvalidArgument);
  ps.parts = {{0}, {1}};
  CHECK_THROWS_AS(validate_partition(ps, 3), InvalidArgument);
  ps.parts = {{0, 5}};
  CHECK_THROWS_AS(validate_partition(ps, 2), InvalidArgument);
}

TEST_CASE("batching") {
  CHECK(num_inputs(1500, 10) == 150);
  CHECK(num_inputs(5, 2) == 3);
  const Graph g = random_graph(120, 0.05, 11);

  SUBCASE("five parts in pairs") {
    const PartitionSet ps = partition(g, 5, 1);
    const auto batches = make_batches(g, ps, 2, 1);
    REQUIRE(batches.size() == 3);
    std::vector<std::size_t> sizes;
    for (const auto& b : batches) sizes.push_back(b.member_parts.size());
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 2, 2});
  }
  SUBCASE("beta 1 keeps the partitions") {
    const PartitionSet ps = partition(g, 6, 1);
    const auto batches = make_batches(g, ps, 1, 4);
    std::vector<std::vector<NodeId>> sets;
    for (const auto& b : batches) sets.push_back(b.node_set);
    auto parts = ps.parts;
    std::sort(sets.begin(), sets.end());
    std::sort(parts.begin(), parts.end());
    CHECK(sets == parts);
  }
  SUBCASE("count and soundness over many shapes") {
    for (std::size_t k = 1; k <= 12; ++k) {
      const PartitionSet ps = partition(g, k, k);
      for (std::size_t beta = 1; beta <= k; ++beta) {
        const auto batches = make_batches(g, ps, beta, 100 + beta);
        CHECK(batches.size() == num_inputs(k, beta));
        std::size_t covered = 0;
        for (const auto& b : batches) {
          CHECK(b.member_parts.size() <= beta);
          CHECK(b.subgraph.num_nodes() == b.node_set.size());
          covered += b.node_set.size();
          std::size_t inside = 0;
          for (const auto& e : g.edges()) {
            inside += std::binary_search(b.node_set.begin(), b.node_set.end(), e.u) &&
                      std::binary_search(b.node_set.begin(), b.node_set.end(), e.v);
          }
          CHECK(b.subgraph.num_edges() == inside);
          for (const auto& e : b.subgraph.edges()) {
            CHECK(g.has_edge(b.node_set[e.u], b.node_set[e.v]));
            CHECK(b.subgraph.node_order()[e.u] == b.node_set[e.u]);
          }
        }
        CHECK(covered == g.num_nodes());
      }
    }
  }
  SUBCASE("deterministic per seed") {
    const PartitionSet ps = partition(g, 9, 2);
    const auto a = make_batches(g, ps, 4, 77);
    const auto b = make_batches(g, ps, 4, 77);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].node_set == b[i].node_set);
  }
  const PartitionSet ps = partition(g, 4, 1);
  CHECK_THROWS_AS(make_batches(g, ps, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(make_batches(g, ps, 5, 1), InvalidArgument);
}

TEST_CASE("induced subgraph") {
  const Graph tri(3, {{0, 1}, {1, 2}, {0, 2}});
  const std::vector<NodeId> two{0, 1};
  CHECK(induced_subgraph(tri, two).num_edges() == 1);
  const std::vector<NodeId> all{2, 0, 1, 1};
  CHECK(induced_subgraph(tri, all).num_edges() == 3);
  const std::vector<NodeId> bad{0, 3};
  CHECK_THROWS_AS(induced_subgraph(tri, bad), InvalidArgument);

  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Graph g = random_graph(20, 0.3, seed);
    Rng rng(seed + 1000);
    std::vector<NodeId> ids(20);
    for (NodeId i = 0; i < 20; ++i) ids[i] = i;
    shuffle(ids.begin(), ids.end(), rng);
    std::vector<NodeId> subset(ids.begin(), ids.begin() + 8);
    std::size_t expected = 0;
    for (const auto& e : g.edges()) {
      expected += std::count(subset.begin(), subset.end(), e.u) && std::count(subset.begin(), subset.end(), e.v);
    }
    const Graph sub = induced_subgraph(g, subset);
    CHECK(sub.num_edges() == expected);
    CHECK(sub.num_nodes() == 8);
  }
}

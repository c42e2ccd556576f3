#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace regraphx {

using NodeId = std::uint32_t;

/// Undirected edge stored with u <= v. u == v only for explicitly added self-loops.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  auto operator<=>(const Edge&) const = default;
};

struct GraphMeta {
  std::size_t duplicate_edges_dropped = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t components = 0;
};

/// Immutable undirected graph with a CSR neighbor index.
///
/// Construction normalizes the edge list (orientation, sort, dedup) and
/// records how many duplicates were collapsed. node_order maps local row
/// index to the id of the node in the root graph; it is the identity for
/// loaded and generated graphs.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t num_nodes, std::vector<Edge> edges, std::size_t feature_dim = 0);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeId> node_order() const noexcept { return node_order_; }
  std::span<const NodeId> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const { return neighbors(u).size(); }
  bool has_edge(NodeId u, NodeId v) const;
  std::size_t num_self_loops() const noexcept { return self_loops_; }

  /// Nonzeros of the symmetric binary adjacency matrix: 2 per edge, 1 per self-loop.
  std::size_t adjacency_nnz() const noexcept { return 2 * (edges_.size() - self_loops_) + self_loops_; }

  const GraphMeta& meta() const noexcept { return meta_; }
  GraphMeta& meta() noexcept { return meta_; }

  void set_feature_dim(std::size_t d) noexcept { feature_dim_ = d; }
  void set_node_order(std::vector<NodeId> order);

 private:
  std::size_t num_nodes_ = 0;
  std::size_t feature_dim_ = 0;
  std::size_t self_loops_ = 0;
  std::vector<Edge> edges_;
  std::vector<NodeId> node_order_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adj_;
  GraphMeta meta_;
};

/// Copy of g with (i, i) present for every node.
Graph with_self_loops(const Graph& g);

std::size_t count_components(const Graph& g);

// ---------------------------------------------------------------------------
// Edge-list files

struct LoadOptions {
  bool self_loops = false;
  std::size_t feature_dim = 0;
};

/// Parses "u v" lines; '#' lines are comments and an optional leading
/// "nodes=<N>" header fixes the node count. Self-loop lines are dropped
/// (counted in meta) since loops only enter through LoadOptions::self_loops.
Graph parse_edge_list(std::istream& in, const LoadOptions& options = {});
Graph load_edge_list(const std::string& path, const LoadOptions& options = {});

/// Canonical text form (header + sorted edges), reloadable by parse_edge_list.
std::string to_edge_list(const Graph& g);

// ---------------------------------------------------------------------------
// Synthetic graphs

enum class SyntheticKind { PowerLaw, Grid, Random };

struct SyntheticParams {
  double exponent = 2.5;      ///< power_law: degree exponent gamma > 1
  double avg_degree = 8.0;    ///< power_law: target mean degree
  double edge_prob = 0.01;    ///< random: G(n, p) edge probability
  std::size_t grid_width = 0; ///< grid: columns; 0 picks the largest divisor <= sqrt(n)
};

SyntheticKind synthetic_kind_from_string(const std::string& s);
std::string to_string(SyntheticKind kind);

Graph generate_synthetic(SyntheticKind kind, std::size_t num_nodes, const SyntheticParams& params,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Partitioning and batching

struct PartitionSet {
  std::vector<std::vector<NodeId>> parts;  ///< each sorted ascending
  std::size_t num_parts() const noexcept { return parts.size(); }
};

/// Throws InvalidArgument unless ps is a disjoint cover of [0, num_nodes) with nonempty parts.
void validate_partition(const PartitionSet& ps, std::size_t num_nodes);

std::size_t edge_cut(const Graph& g, const PartitionSet& ps);

class Partitioner {
 public:
  virtual ~Partitioner() = default;
  virtual PartitionSet partition(const Graph& g, std::size_t num_parts, std::uint64_t seed) const = 0;
};

/// Greedy graph growing: each part is grown breadth-first from a peripheral
/// seed to an exact balanced size, then boundary nodes move to the neighboring
/// part holding most of their neighbors while sizes stay within +-imbalance.
class GreedyBfsPartitioner final : public Partitioner {
 public:
  struct Options {
    bool refine = true;
    std::size_t max_refine_passes = 4;
    double imbalance = 0.10;
  };

  GreedyBfsPartitioner() = default;
  explicit GreedyBfsPartitioner(Options options) : options_(options) {}

  PartitionSet partition(const Graph& g, std::size_t num_parts, std::uint64_t seed) const override;

 private:
  Options options_;
};

PartitionSet partition(const Graph& g, std::size_t num_parts, std::uint64_t seed);

struct Batch {
  std::vector<NodeId> node_set;           ///< sorted ids in the partitioned graph
  Graph subgraph;                         ///< induced, reindexed in node_set order
  std::vector<std::size_t> member_parts;  ///< indices into the PartitionSet
};

/// Number of training inputs for num_parts parts merged beta at a time.
constexpr std::size_t num_inputs(std::size_t num_parts, std::size_t beta) {
  return (num_parts + beta - 1) / beta;
}

std::vector<Batch> make_batches(const Graph& g, const PartitionSet& ps, std::size_t beta,
                                std::uint64_t seed);

/// Subgraph on node_set (treated as a set), reindexed in ascending id order.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> node_set);

}  // namespace regraphx

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "regraphx/graph.hpp"
#include "regraphx/tiler.hpp"

namespace regraphx {

struct GnnConfig {
  std::vector<std::size_t> layer_dims{128, 128, 128};  ///< d0 .. dL
  std::size_t value_bits = 16;
  std::size_t num_epochs = 1;
  double bv1_multiplier = 1.0;  ///< loss + optimizer cost folded into BV1

  std::size_t num_layers() const noexcept { return layer_dims.empty() ? 0 : layer_dims.size() - 1; }
  void validate() const;
  bool operator==(const GnnConfig&) const = default;
};

enum class StageKind { V, E };
enum class Phase { Forward, Backward };

struct Stage {
  StageKind kind = StageKind::V;
  Phase phase = Phase::Forward;
  std::size_t layer = 1;  ///< 1-based
  std::size_t id = 0;     ///< position in pipeline order

  std::string name() const;  ///< "V1", "E2", "BE2", "BV1", ...
};

enum class EdgeClass { Partition, Replicate };

/// Dataflow from one stage to its consumers, carrying the producer's output.
struct StageEdge {
  std::size_t producer = 0;
  std::vector<std::size_t> consumers;
  EdgeClass edge_class = EdgeClass::Partition;
};

struct StageGraph {
  std::vector<Stage> stages;
  std::vector<StageEdge> edges;
  std::size_t num_layers = 0;

  std::size_t size() const noexcept { return stages.size(); }
  std::size_t index_of(StageKind kind, Phase phase, std::size_t layer) const;
  /// Edge leaving a stage, or nullptr for the terminal stage.
  const StageEdge* out_edge(std::size_t stage) const;
};

/// Pipeline order V1, E1, ..., VL, EL, BEL, BVL, ..., BE1, BV1.
StageGraph build_stage_graph(const GnnConfig& cfg);

/// Graphviz text for documentation.
std::string to_dot(const StageGraph& sg);

/// Work of one stage on one batch.
struct StageWork {
  std::uint64_t macs = 0;
  std::uint64_t logical_ops = 0;   ///< M-wide crossbar operations
  std::uint64_t output_bits = 0;
  std::size_t rows = 0;            ///< batch nodes
  std::size_t in_width = 0;
  std::size_t out_width = 0;
  std::size_t blocks = 0;          ///< independent M x M blocks in one data copy
  std::size_t one_copy_crossbars = 0;
  std::map<std::size_t, std::uint64_t> consumer_bits;
};

/// grid must be the E-PE tiling of batch_graph; v_crossbar_size is the V-PE
/// crossbar edge used to block weight matrices.
StageWork stage_work(const Stage& stage, const Graph& batch_graph, const GnnConfig& cfg,
                     const TileGrid& grid, const TileSpec& vpe, const TileSpec& epe,
                     std::size_t adjacency_value_bits = 1);
StageWork stage_work(const Stage& stage, const Batch& batch, const GnnConfig& cfg,
                     const TileGrid& grid, const TileSpec& vpe, const TileSpec& epe,
                     std::size_t adjacency_value_bits = 1);

/// Works for every stage, with consumer volumes filled from the stage graph.
std::vector<StageWork> stage_works(const StageGraph& sg, const Graph& batch_graph,
                                   const GnnConfig& cfg, const TileGrid& grid, const TileSpec& vpe,
                                   const TileSpec& epe, std::size_t adjacency_value_bits = 1);

struct StageTiming {
  double compute = 0.0;
  double comm = 0.0;
};

enum class Bound { Compute, Communication };

struct MakespanResult {
  double slot_time = 0.0;  ///< T
  double makespan = 0.0;
  std::size_t bottleneck_stage = 0;
  Bound bound = Bound::Compute;
  std::size_t slots = 0;   ///< total synchronous slots executed
};

/// Synchronous-slot pipeline: T = max stage time, makespan =
/// epochs * (num_inputs + S - 1) * T.
MakespanResult pipeline_makespan(std::span<const StageTiming> stage_times, std::size_t num_inputs,
                                 std::size_t epochs);

std::string to_string(StageKind kind);
std::string to_string(Phase phase);
std::string to_string(EdgeClass c);
std::string to_string(Bound b);

}  // namespace regraphx

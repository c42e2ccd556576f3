#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regraphx/graph.hpp"
#include "regraphx/hw_model.hpp"
#include "regraphx/mapper.hpp"
#include "regraphx/noc.hpp"
#include "regraphx/tiler.hpp"
#include "regraphx/workload.hpp"

namespace regraphx {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::PowerLaw;
  std::size_t num_nodes = 1024;
  SyntheticParams params;

  bool operator==(const SyntheticSpec& o) const {
    return kind == o.kind && num_nodes == o.num_nodes && params.exponent == o.params.exponent &&
           params.avg_degree == o.params.avg_degree && params.edge_prob == o.params.edge_prob &&
           params.grid_width == o.params.grid_width;
  }
};

/// Either an edge-list file or a synthetic generator.
struct GraphSource {
  std::string path;
  std::optional<SyntheticSpec> synthetic;
  bool self_loops = false;
  std::size_t feature_dim = 0;  ///< 0: take gnn.layer_dims[0]

  bool operator==(const GraphSource&) const = default;
};

struct HardwareConfig {
  TileSpec vpe = TileSpec::vpe_default();
  TileSpec epe = TileSpec::epe_default();
  std::size_t vpe_count = 64;
  std::size_t epe_count = 128;
  bool epe_in_flight = false;     ///< size E-PE requirement for every in-flight E stage
  bool adjacency_reload = false;  ///< charge a per-batch adjacency write to E stages
  std::size_t adjacency_value_bits = 1;

  bool operator==(const HardwareConfig&) const = default;
};

struct NocConfig {
  std::size_t mesh_x = 4;
  std::size_t mesh_y = 4;
  std::vector<TierKind> tiers{TierKind::E, TierKind::V, TierKind::E};
  std::size_t tiles_per_router = 4;
  LinkParams link;
  LinkWeights weights;

  Topology3D topology() const { return Topology3D(mesh_x, mesh_y, tiers, tiles_per_router); }
  bool operator==(const NocConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GraphSource graph;
  GnnConfig gnn;
  std::size_t num_parts = 16;
  std::size_t beta = 4;
  std::uint64_t seed = 1;
  HardwareConfig hardware;
  NocConfig noc;
  EnergyParams energy;
  RoutingMode routing = RoutingMode::Multicast;
  SaParams sa;  ///< sa.seed is ignored; the "sa" sub-stream of seed is used

  /// Throws ConfigError on any inconsistency that can be detected without loading the graph.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

Json config_to_json(const ExperimentConfig& cfg);
/// Strict: unknown keys and type mismatches raise ConfigError. Missing keys take defaults.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);

/// 16 hex digits of FNV-1a over the canonical config JSON.
std::string config_hash(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Reports

struct StageReport {
  std::size_t id = 0;
  std::string name;
  StageKind kind = StageKind::V;
  Phase phase = Phase::Forward;
  std::size_t layer = 1;
  std::vector<TileId> tiles;
  std::size_t logical_units = 0;  ///< on the largest batch
  std::uint64_t macs = 0;         ///< summed over batches, one epoch
  std::uint64_t logical_ops = 0;  ///< summed over batches, one epoch
  std::uint64_t max_output_bits = 0;
  double compute_s = 0.0;         ///< max over batches
  double comm_s = 0.0;            ///< max over pipeline slots
  std::uint64_t comm_cycles = 0;
  double compute_energy_j = 0.0;  ///< all batches, all epochs
};

struct SlotStageComm {
  std::size_t slot = 0;
  std::size_t stage = 0;
  std::size_t batch = 0;
  std::uint64_t comm_cycles = 0;
  std::string bottleneck_link;
  std::uint64_t max_link_flits = 0;
};

struct SlotComm {
  std::size_t slot = 0;
  std::uint64_t cycles = 0;
  std::uint64_t link_flits = 0;  ///< total link traversals in the slot
};

struct LinkUsage {
  std::string link;
  std::uint64_t flits = 0;
  double utilization = 0.0;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;
};

struct SimReport {
  std::string name;
  RoutingMode mode = RoutingMode::Multicast;
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t num_parts = 0;
  std::size_t beta = 0;
  std::size_t num_inputs = 0;
  std::size_t epochs = 0;
  std::size_t edge_cut = 0;

  std::vector<StageReport> stages;
  std::size_t bottleneck_stage = 0;
  Bound bound = Bound::Compute;
  double slot_time_s = 0.0;
  double makespan_s = 0.0;

  double energy_compute_j = 0.0;
  double energy_noc_j = 0.0;
  double energy_write_j = 0.0;
  double energy_total_j = 0.0;
  double edp = 0.0;  ///< makespan_s * energy_total_j

  std::size_t epe_requirement = 0;
  std::size_t max_batch_nodes = 0;
  std::size_t max_batch_tiles = 0;
  ZeroStats zeros;  ///< summed over batches

  std::uint64_t total_link_flits = 0;  ///< one epoch
  std::vector<LinkUsage> top_links;
  std::vector<SlotComm> slots;
  std::vector<SlotStageComm> slot_stages;

  double sa_initial_cost = 0.0;
  double sa_best_cost = 0.0;
  std::size_t sa_iterations = 0;
  bool mapping_from_file = false;
  Mapping mapping;

  Provenance provenance;
};

Json report_to_json(const SimReport& r, const Topology3D& topo, const StageGraph& sg);
/// report.json text (two-space indent, trailing newline).
std::string report_json_text(const SimReport& r, const Topology3D& topo, const StageGraph& sg);
std::string summary_csv(const SimReport& r);

Json mapping_to_json(const Mapping& m, const StageGraph& sg, const Topology3D& topo);
/// Accepts a mapping array, {"mapping": [...]}, or a whole report.json.
Mapping mapping_from_json(const Json& j, const StageGraph& sg);

// ---------------------------------------------------------------------------
// Orchestration

/// One configured experiment: the prepared workload, a mapping, and
/// evaluation under either routing mode. Errors from each phase are tagged
/// with the phase name.
class Simulation {
 public:
  explicit Simulation(ExperimentConfig cfg);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const Graph& graph() const noexcept { return graph_; }
  const PartitionSet& partitions() const noexcept { return parts_; }
  const std::vector<Batch>& batches() const noexcept { return batches_; }
  const StageGraph& stage_graph() const noexcept { return sg_; }
  const Topology3D& topology() const noexcept { return topo_; }
  const MappingProblem& problem() const noexcept { return problem_; }
  const std::vector<StageWork>& works(std::size_t batch) const { return works_.at(batch); }
  std::size_t representative_batch() const noexcept { return rep_batch_; }

  /// Anneals a mapping (or adopts mapping_in after checking it).
  void map(const std::optional<Mapping>& mapping_in = std::nullopt);
  const Mapping& mapping() const noexcept { return mapping_; }
  const SaResult& sa_result() const noexcept { return sa_; }

  SimReport evaluate(RoutingMode mode) const;

 private:
  ExperimentConfig cfg_;
  Graph graph_;
  PartitionSet parts_;
  std::vector<Batch> batches_;
  std::vector<ZeroStats> zeros_;
  std::vector<std::vector<StageWork>> works_;
  StageGraph sg_;
  Topology3D topo_;
  MappingProblem problem_;
  std::size_t rep_batch_ = 0;
  Mapping mapping_;
  SaResult sa_;
  bool mapped_ = false;
  bool mapping_from_file_ = false;
};

struct RunOptions {
  std::optional<Mapping> mapping_in;
};

SimReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

enum class SweepParam { Beta, EpeCrossbarSize, RoutingMode };
SweepParam sweep_param_from_string(const std::string& s);
std::string to_string(SweepParam p);

struct SweepPoint {
  std::string value;
  std::optional<SimReport> report;
  std::string error;  ///< set when the point failed
};

/// Applies one value to a copy of cfg; throws ConfigError for unusable values.
ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepParam param, const std::string& value);

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, SweepParam param,
                              const std::vector<std::string>& values);
/// One row per point; norm_* columns are raw / raw of the first point.
std::string sweep_csv(SweepParam param, const std::vector<SweepPoint>& points);

struct RoutingComparison {
  SimReport unicast;
  SimReport multicast;
  /// Mean over stages with multicast comm > 0 of (unicast - multicast) / multicast.
  double mean_unicast_penalty = 0.0;
};

/// Both routing modes on one shared mapping.
RoutingComparison compare_routing(const ExperimentConfig& cfg, const RunOptions& options = {});
std::string compare_routing_csv(const RoutingComparison& c);

struct TileStatsRow {
  std::string dataset;
  ZeroStats stats;
  double normalized_zeros = 0.0;  ///< vs. the M = 8 tiling
};

/// Zero statistics summed over the parts of a num_parts partition (1: whole graph).
std::vector<TileStatsRow> tile_stats(const std::string& dataset, const Graph& g,
                                     const std::vector<std::size_t>& sizes, std::size_t num_parts,
                                     std::uint64_t seed, bool self_loops);
std::string tile_stats_csv(const std::vector<TileStatsRow>& rows);

/// Shortest text that round-trips the double.
std::string format_double(double v);

}  // namespace regraphx

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "regraphx/noc.hpp"
#include "regraphx/workload.hpp"

namespace regraphx {

/// Stage -> ordered tile list. A tile belongs to at most one stage and V
/// stages live on V-tier tiles, E stages on E-tier tiles.
struct Mapping {
  std::vector<std::vector<TileId>> assignment;

  bool operator==(const Mapping&) const = default;
};

/// What must fit: crossbar demand of one data copy per stage, and the
/// physical crossbars of a V-PE and of an E-PE.
struct MappingProblem {
  const StageGraph* stage_graph = nullptr;
  const Topology3D* topology = nullptr;
  std::vector<std::size_t> demand;
  std::size_t v_capacity = 96;
  std::size_t e_capacity = 96;

  TierKind kind_of(std::size_t stage) const;
  std::size_t capacity_of(std::size_t stage) const;
  /// Whole tiles a stage needs (at least one).
  std::size_t tiles_required(std::size_t stage) const;
};

TierKind tier_for(StageKind kind);

/// Stages take consecutive runs of their tier's tiles in scanline order,
/// in pipeline order. Throws CapacityError naming each short tier.
Mapping initial_mapping(const MappingProblem& problem);

/// Empty string when m satisfies every mapping invariant, else the first violation.
std::string check_mapping(const Mapping& m, const MappingProblem& problem);

struct LinkWeights {
  double planar = 1.0;
  double vertical = 1.0;
  bool operator==(const LinkWeights&) const = default;
};

/// Sum over generated flows of volume_bits x weighted links: tree links for
/// multicast flows, path hops for unicast flows. Local deliveries cost 0.
double mapping_cost(const Mapping& m, const StageGraph& sg, std::span<const StageWork> works,
                    const Topology3D& topo, RoutingMode mode, std::size_t flit_bits,
                    const LinkWeights& weights = {});

struct SaParams {
  double initial_temp = 0.0;  ///< 0: std-dev of 100 random-neighbor cost deltas
  double cooling_rate = 0.95;
  std::size_t iterations_per_temp = 200;
  double min_temp_ratio = 1e-4;  ///< stop once temp < initial_temp * ratio
  std::size_t max_iterations = SIZE_MAX;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const SaParams&) const = default;
};

struct SaContext {
  MappingProblem problem;
  std::span<const StageWork> works;
  RoutingMode mode = RoutingMode::Multicast;
  std::size_t flit_bits = 32;
  LinkWeights weights;
  bool verify_states = false;  ///< re-check every accepted state (tests)
};

struct SaResult {
  Mapping best;
  double initial_cost = 0.0;
  double best_cost = 0.0;
  double initial_temp = 0.0;
  std::vector<double> trace;  ///< best cost after each temperature step
  std::size_t iterations = 0;
  std::size_t accepted = 0;
};

SaResult sa_optimize(const Mapping& m0, const SaParams& params, const SaContext& ctx);

}  // namespace regraphx

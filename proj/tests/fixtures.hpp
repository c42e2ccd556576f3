#pragma once

#include <memory>
#include <vector>

#include "regraphx/mapper.hpp"
#include "regraphx/noc.hpp"
#include "regraphx/rng.hpp"
#include "regraphx/workload.hpp"

namespace fixture {

using namespace regraphx;

/// A mapping problem small enough to enumerate: one GNN layer (four stages)
/// on an E/V/E stack of mesh_x x mesh_y routers with one tile per router,
/// random stage output volumes.
struct TinyInstance {
  TinyInstance(std::size_t mesh_x, std::size_t mesh_y)
      : topo(mesh_x, mesh_y, {TierKind::E, TierKind::V, TierKind::E}, 1) {}

  StageGraph sg;
  Topology3D topo;
  std::vector<StageWork> works;
  MappingProblem problem;
};

inline std::unique_ptr<TinyInstance> tiny_instance(std::uint64_t seed, std::size_t mesh_x = 2,
                                                   std::size_t mesh_y = 1) {
  auto inst = std::make_unique<TinyInstance>(mesh_x, mesh_y);
  GnnConfig cfg;
  cfg.layer_dims = {16, 16};
  inst->sg = build_stage_graph(cfg);
  Rng rng(seed);
  inst->works.resize(inst->sg.size());
  for (auto& w : inst->works) w.output_bits = 32 * (1 + uniform_below(rng, 200));
  inst->problem.stage_graph = &inst->sg;
  inst->problem.topology = &inst->topo;
  inst->problem.demand.assign(inst->sg.size(), 50);
  return inst;
}

}  // namespace fixture

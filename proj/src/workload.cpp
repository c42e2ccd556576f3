#include "regraphx/workload.hpp"

#include <algorithm>
#include <sstream>

#include "regraphx/error.hpp"

namespace regraphx {

void GnnConfig::validate() const {
  if (layer_dims.size() < 2) throw ConfigError("gnn: layer_dims needs at least two entries (L >= 1)");
  for (auto d : layer_dims) {
    if (d < 1) throw ConfigError("gnn: every layer dimension must be >= 1");
  }
  if (value_bits < 1) throw ConfigError("gnn: value_bits must be >= 1");
  if (!(bv1_multiplier > 0.0)) throw ConfigError("gnn: bv1_multiplier must be > 0");
}

std::string Stage::name() const {
  std::string s = phase == Phase::Backward ? "B" : "";
  s += kind == StageKind::V ? "V" : "E";
  return s + std::to_string(layer);
}

std::size_t StageGraph::index_of(StageKind kind, Phase phase, std::size_t layer) const {
  for (const auto& s : stages) {
    if (s.kind == kind && s.phase == phase && s.layer == layer) return s.id;
  }
  throw InvalidArgument("no stage " + std::string(phase == Phase::Backward ? "B" : "") +
                        (kind == StageKind::V ? "V" : "E") + std::to_string(layer));
}

const StageEdge* StageGraph::out_edge(std::size_t stage) const {
  for (const auto& e : edges) {
    if (e.producer == stage) return &e;
  }
  return nullptr;
}

StageGraph build_stage_graph(const GnnConfig& cfg) {
  cfg.validate();
  const std::size_t L = cfg.num_layers();
  StageGraph sg;
  sg.num_layers = L;
  auto add = [&](StageKind k, Phase p, std::size_t layer) {
    sg.stages.push_back({k, p, layer, sg.stages.size()});
  };
  for (std::size_t i = 1; i <= L; ++i) {
    add(StageKind::V, Phase::Forward, i);
    add(StageKind::E, Phase::Forward, i);
  }
  for (std::size_t i = L; i >= 1; --i) {
    add(StageKind::E, Phase::Backward, i);
    add(StageKind::V, Phase::Backward, i);
  }
  // Forward V outputs feed the next stage and their own backward stage; all
  // other stages hand their output to the next stage in pipeline order.
  for (const auto& s : sg.stages) {
    if (s.id + 1 == sg.stages.size()) break;
    StageEdge e;
    e.producer = s.id;
    e.consumers.push_back(s.id + 1);
    if (s.kind == StageKind::V && s.phase == Phase::Forward) {
      e.edge_class = EdgeClass::Replicate;
      e.consumers.push_back(sg.index_of(StageKind::V, Phase::Backward, s.layer));
    }
    sg.edges.push_back(std::move(e));
  }
  return sg;
}

std::string to_dot(const StageGraph& sg) {
  std::ostringstream out;
  out << "digraph pipeline {\n  rankdir=LR;\n";
  for (const auto& s : sg.stages) {
    out << "  s" << s.id << " [label=\"" << s.name() << "\", shape="
        << (s.kind == StageKind::V ? "box" : "ellipse") << "];\n";
  }
  for (const auto& e : sg.edges) {
    for (auto c : e.consumers) {
      out << "  s" << e.producer << " -> s" << c;
      if (e.edge_class == EdgeClass::Replicate) out << " [style=bold, label=\"replicate\"]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

StageWork stage_work(const Stage& stage, const Graph& batch_graph, const GnnConfig& cfg,
                     const TileGrid& grid, const TileSpec& vpe, const TileSpec& epe,
                     std::size_t adjacency_value_bits) {
  if (grid.n != batch_graph.num_nodes()) {
    throw InvalidArgument("stage_work: tile grid order " + std::to_string(grid.n) +
                          " does not match batch of " + std::to_string(batch_graph.num_nodes()) + " nodes");
  }
  if (grid.M != epe.crossbar_size) {
    throw InvalidArgument("stage_work: tile grid M=" + std::to_string(grid.M) +
                          " does not match E-PE crossbar size " + std::to_string(epe.crossbar_size));
  }
  if (stage.layer < 1 || stage.layer > cfg.num_layers()) {
    throw InvalidArgument("stage_work: layer " + std::to_string(stage.layer) + " out of range");
  }
  const std::size_t d_in = cfg.layer_dims[stage.layer - 1];
  const std::size_t d_out = cfg.layer_dims[stage.layer];
  const std::uint64_t n = batch_graph.num_nodes();

  StageWork w;
  w.rows = n;
  if (stage.kind == StageKind::V) {
    const std::size_t m = vpe.crossbar_size;
    w.blocks = ((d_in + m - 1) / m) * ((d_out + m - 1) / m);
    w.one_copy_crossbars = crossbars_needed(d_in, d_out, vpe);
    w.macs = n * d_in * d_out;
    w.logical_ops = n * w.blocks;
    if (stage.phase == Phase::Backward) {
      // input-gradient and weight-gradient products
      w.macs *= 2;
      w.logical_ops *= 2;
      w.in_width = d_out;
      w.out_width = d_in;
    } else {
      w.in_width = d_in;
      w.out_width = d_out;
    }
  } else {
    const std::uint64_t tiles = grid.tiles.size();
    const std::uint64_t m = grid.M;
    w.blocks = tiles;
    w.one_copy_crossbars = tiles * bit_slices(adjacency_value_bits, epe.cell_bits);
    w.macs = tiles * m * m * d_out;
    w.logical_ops = tiles * d_out;
    w.in_width = d_out;
    w.out_width = d_out;
  }
  w.output_bits = n * w.out_width * cfg.value_bits;
  return w;
}

StageWork stage_work(const Stage& stage, const Batch& batch, const GnnConfig& cfg,
                     const TileGrid& grid, const TileSpec& vpe, const TileSpec& epe,
                     std::size_t adjacency_value_bits) {
  return stage_work(stage, batch.subgraph, cfg, grid, vpe, epe, adjacency_value_bits);
}

std::vector<StageWork> stage_works(const StageGraph& sg, const Graph& batch_graph,
                                   const GnnConfig& cfg, const TileGrid& grid, const TileSpec& vpe,
                                   const TileSpec& epe, std::size_t adjacency_value_bits) {
  std::vector<StageWork> works;
  works.reserve(sg.size());
  for (const auto& s : sg.stages) {
    works.push_back(stage_work(s, batch_graph, cfg, grid, vpe, epe, adjacency_value_bits));
  }
  for (const auto& e : sg.edges) {
    for (auto c : e.consumers) works[e.producer].consumer_bits[c] = works[e.producer].output_bits;
  }
  return works;
}

MakespanResult pipeline_makespan(std::span<const StageTiming> stage_times, std::size_t num_inputs,
                                 std::size_t epochs) {
  if (num_inputs < 1) throw InvalidArgument("pipeline_makespan: num_inputs must be >= 1");
  MakespanResult r;
  for (std::size_t s = 0; s < stage_times.size(); ++s) {
    const auto& t = stage_times[s];
    if (t.compute < 0.0 || t.comm < 0.0) throw InvalidArgument("pipeline_makespan: negative stage time");
    const double stage_max = std::max(t.compute, t.comm);
    if (s == 0 || stage_max > r.slot_time) {
      r.slot_time = stage_max;
      r.bottleneck_stage = s;
      r.bound = t.comm > t.compute ? Bound::Communication : Bound::Compute;
    }
  }
  const std::size_t S = stage_times.size();
  r.slots = S == 0 ? 0 : epochs * (num_inputs + S - 1);
  r.makespan = static_cast<double>(r.slots) * r.slot_time;
  return r;
}

std::string to_string(StageKind kind) { return kind == StageKind::V ? "V" : "E"; }
std::string to_string(Phase phase) { return phase == Phase::Forward ? "forward" : "backward"; }
std::string to_string(EdgeClass c) { return c == EdgeClass::Partition ? "partition" : "replicate"; }
std::string to_string(Bound b) { return b == Bound::Compute ? "compute" : "communication"; }

}  // namespace regraphx

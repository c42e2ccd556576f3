#include "regraphx/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "regraphx/error.hpp"
#include "regraphx/flows.hpp"
#include "regraphx/rng.hpp"

namespace regraphx {

TierKind tier_for(StageKind kind) { return kind == StageKind::V ? TierKind::V : TierKind::E; }

TierKind MappingProblem::kind_of(std::size_t stage) const {
  return tier_for(stage_graph->stages.at(stage).kind);
}

std::size_t MappingProblem::capacity_of(std::size_t stage) const {
  return kind_of(stage) == TierKind::V ? v_capacity : e_capacity;
}

std::size_t MappingProblem::tiles_required(std::size_t stage) const {
  const std::size_t cap = capacity_of(stage);
  return std::max<std::size_t>(1, (demand.at(stage) + cap - 1) / cap);
}

Mapping initial_mapping(const MappingProblem& problem) {
  const auto& sg = *problem.stage_graph;
  const auto& topo = *problem.topology;
  if (problem.demand.size() != sg.size()) throw InvalidArgument("initial_mapping: one demand per stage required");
  Mapping m;
  m.assignment.resize(sg.size());
  std::string deficits;
  for (TierKind kind : {TierKind::V, TierKind::E}) {
    const auto tiles = topo.tiles_of_kind(kind);
    std::size_t needed = 0;
    for (const auto& s : sg.stages) {
      if (problem.kind_of(s.id) == kind) needed += problem.tiles_required(s.id);
    }
    if (needed > tiles.size()) {
      if (!deficits.empty()) deficits += "; ";
      deficits += to_string(kind) + " tier needs " + std::to_string(needed) + " tiles, has " +
                  std::to_string(tiles.size()) + " (deficit " + std::to_string(needed - tiles.size()) + ")";
      continue;
    }
    std::size_t next = 0;
    for (const auto& s : sg.stages) {
      if (problem.kind_of(s.id) != kind) continue;
      for (std::size_t k = 0; k < problem.tiles_required(s.id); ++k) m.assignment[s.id].push_back(tiles[next++]);
    }
  }
  if (!deficits.empty()) throw CapacityError("capacity infeasible: " + deficits);
  return m;
}

std::string check_mapping(const Mapping& m, const MappingProblem& problem) {
  const auto& sg = *problem.stage_graph;
  const auto& topo = *problem.topology;
  if (m.assignment.size() != sg.size()) return "mapping covers " + std::to_string(m.assignment.size()) +
                                               " of " + std::to_string(sg.size()) + " stages";
  std::vector<std::uint8_t> used(topo.num_tiles(), 0);
  for (const auto& s : sg.stages) {
    const auto& tiles = m.assignment[s.id];
    if (tiles.empty()) return "stage " + s.name() + " is unmapped";
    for (TileId t : tiles) {
      if (t >= topo.num_tiles()) return "stage " + s.name() + " uses unknown tile " + std::to_string(t);
      if (topo.tile_kind(t) != problem.kind_of(s.id)) {
        return "stage " + s.name() + " placed on a " + to_string(topo.tile_kind(t)) + "-tier tile";
      }
      if (used[t]) return "tile " + std::to_string(t) + " is oversubscribed";
      used[t] = 1;
    }
    if (problem.demand.at(s.id) > tiles.size() * problem.capacity_of(s.id)) {
      return "stage " + s.name() + " demand " + std::to_string(problem.demand[s.id]) + " exceeds " +
             std::to_string(tiles.size() * problem.capacity_of(s.id)) + " crossbars";
    }
  }
  return {};
}

double mapping_cost(const Mapping& m, const StageGraph& sg, std::span<const StageWork> works,
                    const Topology3D& topo, RoutingMode mode, std::size_t flit_bits,
                    const LinkWeights& weights) {
  double cost = 0.0;
  for (const auto& f : gen_flows(sg, works, m, mode, flit_bits)) {
    double w = 0.0;
    for (LinkId l : flow_links(topo, f)) w += topo.is_vertical(l) ? weights.vertical : weights.planar;
    cost += static_cast<double>(f.volume_bits) * w;
  }
  return cost;
}

void SaParams::validate() const {
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ConfigError("sa: cooling_rate must lie in (0, 1)");
  if (iterations_per_temp < 1) throw ConfigError("sa: iterations_per_temp must be >= 1");
  if (!(min_temp_ratio > 0.0 && min_temp_ratio < 1.0)) throw ConfigError("sa: min_temp_ratio must lie in (0, 1)");
  if (initial_temp < 0.0) throw ConfigError("sa: initial_temp must be >= 0");
}

namespace {

class NeighborGenerator {
 public:
  explicit NeighborGenerator(const MappingProblem& problem) : problem_(problem) {
    const auto& sg = *problem.stage_graph;
    for (const auto& s : sg.stages) by_kind_[idx(problem.kind_of(s.id))].push_back(s.id);
    for (TierKind k : {TierKind::V, TierKind::E}) tiles_[idx(k)] = problem.topology->tiles_of_kind(k);
  }

  /// A random swap or migrate move; nullopt when the move is infeasible.
  std::optional<Mapping> propose(const Mapping& m, Rng& rng) const {
    const auto& stages = problem_.stage_graph->stages;
    const std::size_t a = uniform_below(rng, stages.size());
    const auto& peers = by_kind_[idx(problem_.kind_of(a))];
    const bool swap = uniform01(rng) < 0.5 && peers.size() > 1;
    Mapping next = m;
    if (swap) {
      // uniform over peers other than a
      const auto pos = static_cast<std::size_t>(std::find(peers.begin(), peers.end(), a) - peers.begin());
      const auto pick = uniform_below(rng, peers.size() - 1);
      const std::size_t b = peers[pick >= pos ? pick + 1 : pick];
      std::swap(next.assignment[a], next.assignment[b]);
      if (next.assignment[a].size() < problem_.tiles_required(a) ||
          next.assignment[b].size() < problem_.tiles_required(b)) {
        return std::nullopt;
      }
      return next;
    }
    const auto& pool = tiles_[idx(problem_.kind_of(a))];
    std::vector<std::uint8_t> used(problem_.topology->num_tiles(), 0);
    for (const auto& list : m.assignment)
      for (TileId t : list) used[t] = 1;
    std::vector<TileId> free;
    for (TileId t : pool) {
      if (!used[t]) free.push_back(t);
    }
    if (free.empty()) return std::nullopt;
    auto& list = next.assignment[a];
    list[uniform_below(rng, list.size())] = free[uniform_below(rng, free.size())];
    std::sort(list.begin(), list.end());
    return next;
  }

 private:
  static std::size_t idx(TierKind k) { return k == TierKind::V ? 0 : 1; }

  const MappingProblem& problem_;
  std::vector<std::size_t> by_kind_[2];
  std::vector<TileId> tiles_[2];
};

}  // namespace

SaResult sa_optimize(const Mapping& m0, const SaParams& params, const SaContext& ctx) {
  params.validate();
  if (const auto why = check_mapping(m0, ctx.problem); !why.empty()) {
    throw InvalidArgument("sa_optimize: infeasible initial mapping: " + why);
  }
  const auto& sg = *ctx.problem.stage_graph;
  const auto& topo = *ctx.problem.topology;
  auto cost_of = [&](const Mapping& m) {
    return mapping_cost(m, sg, ctx.works, topo, ctx.mode, ctx.flit_bits, ctx.weights);
  };

  Rng rng(params.seed);
  NeighborGenerator gen(ctx.problem);

  SaResult r;
  r.best = m0;
  r.initial_cost = r.best_cost = cost_of(m0);
  if (params.max_iterations == 0) return r;

  double temp = params.initial_temp;
  if (temp <= 0.0) {
    std::vector<double> deltas;
    for (std::size_t attempt = 0; attempt < 1000 && deltas.size() < 100; ++attempt) {
      if (auto cand = gen.propose(m0, rng)) deltas.push_back(cost_of(*cand) - r.initial_cost);
    }
    double mean = 0.0;
    for (double d : deltas) mean += d;
    mean /= deltas.empty() ? 1.0 : static_cast<double>(deltas.size());
    double var = 0.0;
    for (double d : deltas) var += (d - mean) * (d - mean);
    var /= deltas.empty() ? 1.0 : static_cast<double>(deltas.size());
    temp = std::sqrt(var);
    if (!(temp > 0.0)) temp = 1.0;
  }
  r.initial_temp = temp;
  const double min_temp = temp * params.min_temp_ratio;

  Mapping current = m0;
  double current_cost = r.initial_cost;
  while (temp >= min_temp && r.iterations < params.max_iterations) {
    for (std::size_t i = 0; i < params.iterations_per_temp && r.iterations < params.max_iterations; ++i) {
      ++r.iterations;
      auto cand = gen.propose(current, rng);
      if (!cand) continue;
      const double c = cost_of(*cand);
      const double delta = c - current_cost;
      if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temp)) {
        current = std::move(*cand);
        current_cost = c;
        ++r.accepted;
        if (ctx.verify_states) {
          if (const auto why = check_mapping(current, ctx.problem); !why.empty()) {
            throw Error("sa_optimize accepted an infeasible state: " + why);
          }
        }
        if (c < r.best_cost) {
          r.best_cost = c;
          r.best = current;
        }
      }
    }
    r.trace.push_back(r.best_cost);
    temp *= params.cooling_rate;
  }
  return r;
}

}  // namespace regraphx

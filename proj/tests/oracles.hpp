#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "regraphx/graph.hpp"
#include "regraphx/mapper.hpp"
#include "regraphx/noc.hpp"
#include "regraphx/workload.hpp"

namespace oracle {

using namespace regraphx;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense symmetric 0/1 adjacency straight from the edge list.
inline IntMatrix dense_adjacency(const Graph& g, bool self_loops) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  IntMatrix a = IntMatrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1;
    a(e.v, e.u) = 1;
  }
  if (self_loops)
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = 1;
  return a;
}

/// Nonempty M x M blocks and stored zeros counted on the dense matrix.
struct DenseZeros {
  std::size_t tiles = 0;
  std::size_t zeros = 0;
};

inline DenseZeros dense_zero_count(const IntMatrix& a, std::size_t M) {
  const auto n = static_cast<std::size_t>(a.rows());
  const std::size_t g = (n + M - 1) / M;
  DenseZeros out;
  for (std::size_t br = 0; br < g; ++br) {
    for (std::size_t bc = 0; bc < g; ++bc) {
      std::size_t nz = 0;
      for (std::size_t r = br * M; r < std::min(n, (br + 1) * M); ++r)
        for (std::size_t c = bc * M; c < std::min(n, (bc + 1) * M); ++c) nz += a(r, c) != 0;
      if (nz > 0) {
        ++out.tiles;
        out.zeros += M * M - nz;
      }
    }
  }
  return out;
}

/// Hop distance by breadth-first search over existing mesh links.
inline std::size_t bfs_distance(const Topology3D& topo, RouterId src, RouterId dst) {
  std::vector<std::size_t> dist(topo.num_routers(), std::numeric_limits<std::size_t>::max());
  std::deque<RouterId> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    const RouterId r = q.front();
    q.pop_front();
    if (r == dst) return dist[r];
    for (RouterId n : topo.neighbors(r)) {
      if (dist[n] == std::numeric_limits<std::size_t>::max()) {
        dist[n] = dist[r] + 1;
        q.push_back(n);
      }
    }
  }
  return dist[dst];
}

/// Directed hop (from router, to router) pairs of an X-then-Y-then-Z walk
/// computed on coordinates only.
inline std::vector<std::pair<RouterId, RouterId>> xyz_walk(const Topology3D& topo, RouterId src, RouterId dst) {
  Coord a = topo.coord(src);
  const Coord b = topo.coord(dst);
  std::vector<std::pair<RouterId, RouterId>> hops;
  auto move = [&](std::size_t Coord::*axis) {
    while (a.*axis != b.*axis) {
      const RouterId from = topo.router_at(a);
      a.*axis = a.*axis < b.*axis ? a.*axis + 1 : a.*axis - 1;
      hops.emplace_back(from, topo.router_at(a));
    }
  };
  move(&Coord::x);
  move(&Coord::y);
  move(&Coord::z);
  return hops;
}

/// Links of the union of per-destination walks.
inline std::size_t path_union_size(const Topology3D& topo, RouterId src, const std::vector<RouterId>& dsts) {
  std::set<std::pair<RouterId, RouterId>> links;
  for (RouterId d : dsts)
    for (const auto& h : xyz_walk(topo, src, d)) links.insert(h);
  return links.size();
}

/// Asynchronous handoff pipeline: batch b enters stage s when it has left
/// stage s-1 and batch b-1 has left stage s. With every duration equal to
/// the slot length this is the lockstep pipeline.
inline double event_pipeline(const std::vector<double>& durations, std::size_t num_inputs, std::size_t epochs) {
  const std::size_t S = durations.size();
  double t_epoch_start = 0.0;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::vector<double> prev_batch(S, t_epoch_start);  // finish time of batch b-1 at each stage
    double last = t_epoch_start;
    for (std::size_t b = 0; b < num_inputs; ++b) {
      double t = t_epoch_start;
      for (std::size_t s = 0; s < S; ++s) {
        const double start = std::max(t, prev_batch[s]);
        t = start + durations[s];
        prev_batch[s] = t;
      }
      last = t;
    }
    t_epoch_start = last;
  }
  return t_epoch_start;
}

/// Greedy schedule on boolean per-cycle link timelines, same order as
/// comm_makespan (volume descending, id ascending). Returns per-flow start
/// cycles in input order and the makespan.
struct BitmapSchedule {
  std::vector<std::uint64_t> start;
  std::uint64_t makespan = 0;
};

inline BitmapSchedule bitmap_schedule(const Topology3D& topo, const std::vector<Flow>& flows, const LinkParams& lp) {
  std::vector<std::size_t> order(flows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (flows[a].volume_bits != flows[b].volume_bits) return flows[a].volume_bits > flows[b].volume_bits;
    return flows[a].id < flows[b].id;
  });
  std::vector<std::uint64_t> lat(flows.size());
  std::vector<std::set<std::pair<RouterId, RouterId>>> links(flows.size());
  std::uint64_t horizon = 0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const auto& f = flows[i];
    const RouterId s = topo.router_of(f.src_tile);
    std::size_t depth = 0;
    for (TileId d : f.dst_tiles) {
      const auto walk = xyz_walk(topo, s, topo.router_of(d));
      depth = std::max(depth, walk.size());
      links[i].insert(walk.begin(), walk.end());
    }
    const std::uint64_t flits = (f.volume_bits + lp.flit_bits - 1) / lp.flit_bits;
    lat[i] = std::max<std::size_t>(depth, 1) * lp.router_delay +
             static_cast<std::uint64_t>(std::ceil(static_cast<double>(flits) / lp.link_rate));
    horizon += lat[i];
  }
  std::map<std::pair<RouterId, RouterId>, std::vector<bool>> busy;
  BitmapSchedule out;
  out.start.assign(flows.size(), 0);
  for (std::size_t i : order) {
    std::uint64_t t = 0;
    for (;; ++t) {
      bool ok = true;
      for (const auto& l : links[i]) {
        auto& line = busy[l];
        if (line.size() < horizon) line.resize(horizon, false);
        for (std::uint64_t c = t; c < t + lat[i] && ok; ++c) ok = !line[c];
        if (!ok) break;
      }
      if (ok) break;
    }
    for (const auto& l : links[i]) {
      auto& line = busy[l];
      for (std::uint64_t c = t; c < t + lat[i]; ++c) line[c] = true;
    }
    out.start[i] = t;
    out.makespan = std::max(out.makespan, t + lat[i]);
  }
  return out;
}

/// Bit-hop cost enumerated directly from the stage graph, without gen_flows.
inline double flow_cost(const Mapping& m, const StageGraph& sg, const std::vector<StageWork>& works,
                        const Topology3D& topo, RoutingMode mode, std::size_t flit_bits) {
  auto round = [&](std::uint64_t bits) { return (bits + flit_bits - 1) / flit_bits * flit_bits; };
  double cost = 0.0;
  for (const auto& e : sg.edges) {
    const auto& prod = m.assignment[e.producer];
    std::vector<TileId> cons;
    for (auto c : e.consumers) cons.insert(cons.end(), m.assignment[c].begin(), m.assignment[c].end());
    const std::uint64_t total = works[e.producer].output_bits;
    for (std::size_t i = 0; i < prod.size(); ++i) {
      const std::uint64_t slice = total / prod.size() + (i < total % prod.size() ? 1 : 0);
      const RouterId src = topo.router_of(prod[i]);
      if (e.edge_class == EdgeClass::Partition) {
        for (std::size_t j = 0; j < cons.size(); ++j) {
          if (cons[j] == prod[i]) continue;
          const std::uint64_t piece = slice / cons.size() + (j < slice % cons.size() ? 1 : 0);
          if (piece == 0) continue;
          cost += static_cast<double>(round(piece)) *
                  static_cast<double>(xyz_walk(topo, src, topo.router_of(cons[j])).size());
        }
        continue;
      }
      std::set<TileId> uniq(cons.begin(), cons.end());
      uniq.erase(prod[i]);
      if (slice == 0 || uniq.empty()) continue;
      if (mode == RoutingMode::Unicast) {
        for (TileId d : uniq)
          cost += static_cast<double>(round(slice)) * static_cast<double>(xyz_walk(topo, src, topo.router_of(d)).size());
      } else {
        std::vector<RouterId> rs;
        for (TileId d : uniq) rs.push_back(topo.router_of(d));
        cost += static_cast<double>(round(slice)) * static_cast<double>(path_union_size(topo, src, rs));
      }
    }
  }
  return cost;
}

/// Every feasible mapping where each stage holds exactly tiles_required
/// tiles, as a sorted list; visit is called once per mapping.
inline void enumerate_mappings(const MappingProblem& p, const std::function<void(const Mapping&)>& visit) {
  const auto& sg = *p.stage_graph;
  Mapping m;
  m.assignment.resize(sg.size());
  std::vector<bool> used(p.topology->num_tiles(), false);
  std::function<void(std::size_t)> place_stage;
  std::function<void(std::size_t, std::size_t, TileId)> pick;
  pick = [&](std::size_t s, std::size_t left, TileId from) {
    if (left == 0) {
      place_stage(s + 1);
      return;
    }
    for (TileId t = from; t < p.topology->num_tiles(); ++t) {
      if (used[t] || p.topology->tile_kind(t) != p.kind_of(s)) continue;
      used[t] = true;
      m.assignment[s].push_back(t);
      pick(s, left - 1, t + 1);
      m.assignment[s].pop_back();
      used[t] = false;
    }
  };
  place_stage = [&](std::size_t s) {
    if (s == sg.size()) {
      visit(m);
      return;
    }
    pick(s, p.tiles_required(s), 0);
  };
  place_stage(0);
}

}  // namespace oracle

#include "regraphx/noc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "regraphx/error.hpp"

namespace regraphx {

namespace {

struct Interval {
  std::uint64_t start;
  std::uint64_t end;
};

}  // namespace

Topology3D::Topology3D(std::size_t mesh_x, std::size_t mesh_y, std::vector<TierKind> tiers,
                       std::size_t tiles_per_router)
    : mesh_x_(mesh_x), mesh_y_(mesh_y), tiers_(std::move(tiers)), tiles_per_router_(tiles_per_router) {
  if (mesh_x_ < 1 || mesh_y_ < 1) throw ConfigError("topology: mesh dimensions must be >= 1");
  if (tiles_per_router_ < 1) throw ConfigError("topology: tiles_per_router must be >= 1");
  const auto v_count = std::count(tiers_.begin(), tiers_.end(), TierKind::V);
  if (v_count != 1) throw ConfigError("topology: exactly one V tier is required");
  v_tier_ = static_cast<std::size_t>(std::find(tiers_.begin(), tiers_.end(), TierKind::V) - tiers_.begin());
  if (v_tier_ == 0 || v_tier_ + 1 == tiers_.size()) {
    throw ConfigError("topology: the V tier must be sandwiched between E tiers");
  }
}

Topology3D Topology3D::regraphx_default() {
  return Topology3D(4, 4, {TierKind::E, TierKind::V, TierKind::E}, 4);
}

Coord Topology3D::coord(RouterId r) const {
  if (r >= num_routers()) throw InvalidArgument("unknown router " + std::to_string(r));
  const std::size_t plane = mesh_x_ * mesh_y_;
  return {r % mesh_x_, (r % plane) / mesh_x_, r / plane};
}

RouterId Topology3D::router_at(const Coord& c) const {
  if (c.x >= mesh_x_ || c.y >= mesh_y_ || c.z >= tiers_.size()) {
    throw InvalidArgument("unknown router (" + std::to_string(c.x) + "," + std::to_string(c.y) + "," +
                          std::to_string(c.z) + ")");
  }
  return (c.z * mesh_y_ + c.y) * mesh_x_ + c.x;
}

RouterId Topology3D::router_of(TileId t) const {
  if (t >= num_tiles()) throw InvalidArgument("unknown tile " + std::to_string(t));
  return t / tiles_per_router_;
}

std::vector<TileId> Topology3D::tiles_of_kind(TierKind kind) const {
  std::vector<TileId> out;
  for (TileId t = 0; t < num_tiles(); ++t) {
    if (tile_kind(t) == kind) out.push_back(t);
  }
  return out;
}

std::size_t Topology3D::count_tiles(TierKind kind) const {
  return static_cast<std::size_t>(std::count(tiers_.begin(), tiers_.end(), kind)) * mesh_x_ * mesh_y_ *
         tiles_per_router_;
}

bool Topology3D::link_exists(LinkId l) const {
  if (l >= num_link_slots()) return false;
  const Coord c = coord(link_source(l));
  switch (link_dir(l)) {
    case Dir::XPos: return c.x + 1 < mesh_x_;
    case Dir::XNeg: return c.x > 0;
    case Dir::YPos: return c.y + 1 < mesh_y_;
    case Dir::YNeg: return c.y > 0;
    case Dir::ZPos: return c.z + 1 < tiers_.size();
    case Dir::ZNeg: return c.z > 0;
  }
  return false;
}

RouterId Topology3D::link_target(LinkId l) const {
  if (!link_exists(l)) throw InvalidArgument("link " + std::to_string(l) + " leaves the mesh");
  Coord c = coord(link_source(l));
  switch (link_dir(l)) {
    case Dir::XPos: ++c.x; break;
    case Dir::XNeg: --c.x; break;
    case Dir::YPos: ++c.y; break;
    case Dir::YNeg: --c.y; break;
    case Dir::ZPos: ++c.z; break;
    case Dir::ZNeg: --c.z; break;
  }
  return router_at(c);
}

std::string Topology3D::link_name(LinkId l) const {
  if (l == kNoLink) return "none";
  static constexpr const char* names[] = {"+x", "-x", "+y", "-y", "+z", "-z"};
  const Coord c = coord(link_source(l));
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + "," + std::to_string(c.z) + ")" +
         names[static_cast<std::size_t>(link_dir(l))];
}

std::vector<RouterId> Topology3D::neighbors(RouterId r) const {
  std::vector<RouterId> out;
  for (std::size_t d = 0; d < kDirs; ++d) {
    const LinkId l = link(r, static_cast<Dir>(d));
    if (link_exists(l)) out.push_back(link_target(l));
  }
  return out;
}

std::string to_string(TierKind k) { return k == TierKind::V ? "V" : "E"; }

TierKind tier_kind_from_string(const std::string& s) {
  if (s == "V") return TierKind::V;
  if (s == "E") return TierKind::E;
  throw ConfigError("unknown tier kind '" + s + "' (expected \"E\" or \"V\")");
}

std::size_t manhattan(const Coord& a, const Coord& b) {
  auto diff = [](std::size_t p, std::size_t q) { return p > q ? p - q : q - p; };
  return diff(a.x, b.x) + diff(a.y, b.y) + diff(a.z, b.z);
}

Route route_xyz(const Topology3D& topo, RouterId src, RouterId dst) {
  Coord at = topo.coord(src);
  const Coord to = topo.coord(dst);
  Route r;
  r.links.reserve(manhattan(at, to));
  auto step = [&](Dir d) {
    const RouterId here = topo.router_at(at);
    r.links.push_back(topo.link(here, d));
  };
  while (at.x != to.x) {
    const bool up = to.x > at.x;
    step(up ? Dir::XPos : Dir::XNeg);
    at.x = up ? at.x + 1 : at.x - 1;
  }
  while (at.y != to.y) {
    const bool up = to.y > at.y;
    step(up ? Dir::YPos : Dir::YNeg);
    at.y = up ? at.y + 1 : at.y - 1;
  }
  while (at.z != to.z) {
    const bool up = to.z > at.z;
    step(up ? Dir::ZPos : Dir::ZNeg);
    at.z = up ? at.z + 1 : at.z - 1;
  }
  return r;
}

MulticastTree multicast_tree(const Topology3D& topo, RouterId src, std::span<const RouterId> dsts) {
  if (dsts.empty()) throw InvalidArgument("multicast_tree: empty destination set");
  MulticastTree tree;
  tree.root = src;
  tree.destinations.assign(dsts.begin(), dsts.end());
  std::sort(tree.destinations.begin(), tree.destinations.end());
  tree.destinations.erase(std::unique(tree.destinations.begin(), tree.destinations.end()),
                          tree.destinations.end());
  for (RouterId d : tree.destinations) {
    const Route r = route_xyz(topo, src, d);
    tree.depth = std::max(tree.depth, r.hops());
    tree.links.insert(tree.links.end(), r.links.begin(), r.links.end());
  }
  std::sort(tree.links.begin(), tree.links.end());
  tree.links.erase(std::unique(tree.links.begin(), tree.links.end()), tree.links.end());
  return tree;
}

std::string check_multicast_tree(const Topology3D& topo, const MulticastTree& tree) {
  std::vector<RouterId> routers{tree.root};
  std::vector<std::size_t> parents(topo.num_routers(), 0);
  for (LinkId l : tree.links) {
    if (!topo.link_exists(l)) return "link " + std::to_string(l) + " leaves the mesh";
    const RouterId t = topo.link_target(l);
    ++parents[t];
    routers.push_back(t);
    routers.push_back(topo.link_source(l));
  }
  std::sort(routers.begin(), routers.end());
  routers.erase(std::unique(routers.begin(), routers.end()), routers.end());
  if (parents[tree.root] != 0) return "root has an incoming link";
  for (RouterId r : routers) {
    if (r != tree.root && parents[r] != 1) return "router " + std::to_string(r) + " has " +
                                                  std::to_string(parents[r]) + " parents";
  }
  if (tree.links.size() + 1 != routers.size()) return "link count is not router count - 1";

  std::vector<std::uint8_t> reached(topo.num_routers(), 0);
  reached[tree.root] = 1;
  std::size_t count = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (LinkId l : tree.links) {
      const RouterId s = topo.link_source(l);
      const RouterId t = topo.link_target(l);
      if (reached[s] && !reached[t]) {
        reached[t] = 1;
        ++count;
        grew = true;
      }
    }
  }
  if (count != routers.size()) return "tree is not connected from the root";

  for (RouterId d : tree.destinations) {
    for (LinkId l : route_xyz(topo, tree.root, d).links) {
      if (!std::binary_search(tree.links.begin(), tree.links.end(), l)) {
        return "route to router " + std::to_string(d) + " is not contained";
      }
    }
  }
  return {};
}

std::string to_string(RoutingMode m) { return m == RoutingMode::Unicast ? "unicast" : "multicast"; }

RoutingMode routing_mode_from_string(const std::string& s) {
  if (s == "unicast") return RoutingMode::Unicast;
  if (s == "multicast") return RoutingMode::Multicast;
  throw InvalidArgument("unknown routing mode '" + s + "' (expected unicast or multicast)");
}

void LinkParams::validate() const {
  if (flit_bits < 1) throw ConfigError("noc: flit_bits must be >= 1");
  if (!(link_rate > 0.0)) throw ConfigError("noc: link_rate must be > 0");
  if (router_delay < 1) throw ConfigError("noc: router_delay must be >= 1");
  if (!(noc_frequency_hz > 0.0)) throw ConfigError("noc: frequency_hz must be > 0");
}

namespace {

std::vector<RouterId> dst_routers(const Topology3D& topo, const Flow& flow) {
  if (flow.dst_tiles.empty()) throw InvalidArgument("flow " + std::to_string(flow.id) + " has no destination");
  std::vector<RouterId> out;
  out.reserve(flow.dst_tiles.size());
  for (TileId t : flow.dst_tiles) out.push_back(topo.router_of(t));
  return out;
}

}  // namespace

std::vector<LinkId> flow_links(const Topology3D& topo, const Flow& flow) {
  const auto dsts = dst_routers(topo, flow);
  return multicast_tree(topo, topo.router_of(flow.src_tile), dsts).links;
}

std::size_t flow_depth(const Topology3D& topo, const Flow& flow) {
  const Coord s = topo.coord(topo.router_of(flow.src_tile));
  std::size_t depth = 0;
  for (RouterId r : dst_routers(topo, flow)) depth = std::max(depth, manhattan(s, topo.coord(r)));
  return depth;
}

std::uint64_t flow_flits(const Flow& flow, const LinkParams& lp) {
  return (flow.volume_bits + lp.flit_bits - 1) / lp.flit_bits;
}

namespace {

std::uint64_t serialization_cycles(std::uint64_t flits, const LinkParams& lp) {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(flits) / lp.link_rate));
}

std::uint64_t latency_for(std::size_t depth, std::uint64_t flits, const LinkParams& lp) {
  return static_cast<std::uint64_t>(std::max<std::size_t>(depth, 1)) * lp.router_delay +
         serialization_cycles(flits, lp);
}

}  // namespace

std::uint64_t flow_latency(const Topology3D& topo, const Flow& flow, const LinkParams& lp) {
  return latency_for(flow_depth(topo, flow), flow_flits(flow, lp), lp);
}

std::uint64_t CommResult::total_link_flits() const {
  return std::accumulate(link_flits.begin(), link_flits.end(), std::uint64_t{0});
}

std::uint64_t CommResult::max_link_flits() const {
  return link_flits.empty() ? 0 : *std::max_element(link_flits.begin(), link_flits.end());
}

LinkId CommResult::bottleneck_link() const {
  const auto peak = max_link_flits();
  if (peak == 0) return kNoLink;
  return static_cast<LinkId>(std::find(link_flits.begin(), link_flits.end(), peak) - link_flits.begin());
}

CommResult comm_makespan(const Topology3D& topo, std::span<const Flow> flows, const LinkParams& lp) {
  lp.validate();
  CommResult result;
  result.link_flits.assign(topo.num_link_slots(), 0);
  result.timings.resize(flows.size());

  std::vector<std::size_t> order(flows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (flows[a].volume_bits != flows[b].volume_bits) return flows[a].volume_bits > flows[b].volume_bits;
    return flows[a].id < flows[b].id;
  });

  std::vector<std::vector<Interval>> busy(topo.num_link_slots());
  for (std::size_t idx : order) {
    const Flow& f = flows[idx];
    if (f.volume_bits == 0) throw InvalidArgument("flow " + std::to_string(f.id) + " has zero volume");
    const auto dsts = dst_routers(topo, f);
    const auto tree = multicast_tree(topo, topo.router_of(f.src_tile), dsts);
    const std::uint64_t flits = flow_flits(f, lp);
    const std::uint64_t lat = latency_for(tree.depth, flits, lp);

    std::uint64_t t = 0;
    for (bool moved = true; moved;) {
      moved = false;
      for (LinkId l : tree.links) {
        for (const auto& iv : busy[l]) {
          if (iv.start < t + lat && t < iv.end) {
            t = iv.end;
            moved = true;
          }
        }
      }
    }
    for (LinkId l : tree.links) {
      auto& ivs = busy[l];
      const auto pos = std::upper_bound(ivs.begin(), ivs.end(), t,
                                        [](std::uint64_t v, const Interval& iv) { return v < iv.start; });
      ivs.insert(pos, Interval{t, t + lat});
      result.link_flits[l] += flits;
    }
    result.timings[idx] = {f.id, t, t + lat};
    result.cycles = std::max(result.cycles, t + lat);
  }
  result.seconds = static_cast<double>(result.cycles) / lp.noc_frequency_hz;
  return result;
}

}  // namespace regraphx

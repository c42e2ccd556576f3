#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace regraphx {

enum class TierKind { E, V };

using RouterId = std::size_t;
using TileId = std::size_t;
using LinkId = std::size_t;

inline constexpr LinkId kNoLink = SIZE_MAX;

struct Coord {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;  ///< tier index, 0 = top
  bool operator==(const Coord&) const = default;
};

enum class Dir : std::uint8_t { XPos, XNeg, YPos, YNeg, ZPos, ZNeg };
inline constexpr std::size_t kDirs = 6;

/// Stacked 2D meshes joined by vertical links between vertically adjacent
/// routers. Exactly one V tier, which must not be the top or bottom tier, so
/// every V router has E routers one hop above and below it.
///
/// Routers are numbered z-major then y then x; tiles attach in blocks of
/// tiles_per_router to consecutive routers. A directed link is (router, Dir);
/// its id is router * 6 + dir, and ids leaving the mesh are never used.
class Topology3D {
 public:
  Topology3D(std::size_t mesh_x, std::size_t mesh_y, std::vector<TierKind> tiers,
             std::size_t tiles_per_router);

  /// 4 x 4 routers per tier, tiers E/V/E, 4 tiles per router: 64 V-PEs and 128 E-PEs.
  static Topology3D regraphx_default();

  std::size_t mesh_x() const noexcept { return mesh_x_; }
  std::size_t mesh_y() const noexcept { return mesh_y_; }
  std::size_t num_tiers() const noexcept { return tiers_.size(); }
  std::size_t tiles_per_router() const noexcept { return tiles_per_router_; }
  const std::vector<TierKind>& tiers() const noexcept { return tiers_; }
  std::size_t v_tier() const noexcept { return v_tier_; }

  std::size_t num_routers() const noexcept { return mesh_x_ * mesh_y_ * tiers_.size(); }
  std::size_t num_tiles() const noexcept { return num_routers() * tiles_per_router_; }
  std::size_t num_link_slots() const noexcept { return num_routers() * kDirs; }

  Coord coord(RouterId r) const;
  RouterId router_at(const Coord& c) const;
  RouterId router_of(TileId t) const;
  TierKind tier_kind(std::size_t z) const { return tiers_.at(z); }
  TierKind router_kind(RouterId r) const { return tiers_[coord(r).z]; }
  TierKind tile_kind(TileId t) const { return router_kind(router_of(t)); }

  /// Tiles of one kind in scanline order: tier, then y, then x, then local slot.
  std::vector<TileId> tiles_of_kind(TierKind kind) const;
  std::size_t count_tiles(TierKind kind) const;

  LinkId link(RouterId r, Dir d) const { return r * kDirs + static_cast<std::size_t>(d); }
  RouterId link_source(LinkId l) const { return l / kDirs; }
  Dir link_dir(LinkId l) const { return static_cast<Dir>(l % kDirs); }
  bool link_exists(LinkId l) const;
  RouterId link_target(LinkId l) const;
  bool is_vertical(LinkId l) const { return link_dir(l) == Dir::ZPos || link_dir(l) == Dir::ZNeg; }
  std::string link_name(LinkId l) const;

  std::vector<RouterId> neighbors(RouterId r) const;

  bool operator==(const Topology3D&) const = default;

 private:
  std::size_t mesh_x_;
  std::size_t mesh_y_;
  std::vector<TierKind> tiers_;
  std::size_t tiles_per_router_;
  std::size_t v_tier_ = 0;
};

std::string to_string(TierKind k);
TierKind tier_kind_from_string(const std::string& s);

struct Route {
  std::vector<LinkId> links;  ///< in traversal order
  std::size_t hops() const noexcept { return links.size(); }
};

/// Dimension-order route: all X hops, then Y, then Z.
Route route_xyz(const Topology3D& topo, RouterId src, RouterId dst);

std::size_t manhattan(const Coord& a, const Coord& b);

struct MulticastTree {
  RouterId root = 0;
  std::vector<LinkId> links;             ///< sorted, unique
  std::vector<RouterId> destinations;    ///< sorted, unique
  std::size_t depth = 0;                 ///< longest root-to-destination hop count
};

/// Union of the dimension-order routes from src to every destination.
MulticastTree multicast_tree(const Topology3D& topo, RouterId src, std::span<const RouterId> dsts);

/// Checks the tree shape (one parent per non-root router, connected from the
/// root, |links| = |routers| - 1) and that every destination's XYZ route is
/// contained. Returns an empty string when valid, otherwise the violation.
std::string check_multicast_tree(const Topology3D& topo, const MulticastTree& tree);

enum class RoutingMode { Unicast, Multicast };
std::string to_string(RoutingMode m);
RoutingMode routing_mode_from_string(const std::string& s);

struct Flow {
  std::size_t id = 0;
  TileId src_tile = 0;
  std::vector<TileId> dst_tiles;  ///< sorted, unique, excludes src_tile
  std::uint64_t volume_bits = 0;  ///< whole flits
  std::size_t slot = 0;
  RoutingMode mode = RoutingMode::Unicast;
  std::size_t stage = 0;          ///< producing pipeline stage
};

struct LinkParams {
  std::size_t flit_bits = 32;
  double link_rate = 1.0;        ///< flits per cycle
  std::size_t router_delay = 1;  ///< cycles per hop
  double noc_frequency_hz = 1e9;

  void validate() const;
  bool operator==(const LinkParams&) const = default;
};

/// Mesh links a flow occupies: its route, or its tree for multicast flows
/// with several destination routers. Sorted.
std::vector<LinkId> flow_links(const Topology3D& topo, const Flow& flow);

/// Mesh hops from source router to the farthest destination router.
std::size_t flow_depth(const Topology3D& topo, const Flow& flow);

std::uint64_t flow_flits(const Flow& flow, const LinkParams& lp);

/// Wormhole occupancy: hops * router_delay + ceil(flits / link_rate). A flow
/// whose destinations all share the source router pays one router_delay
/// for the local hop and no mesh link.
std::uint64_t flow_latency(const Topology3D& topo, const Flow& flow, const LinkParams& lp);

struct FlowTiming {
  std::size_t flow_id = 0;
  std::uint64_t start = 0;
  std::uint64_t finish = 0;
};

struct CommResult {
  std::uint64_t cycles = 0;
  double seconds = 0.0;
  std::vector<std::uint64_t> link_flits;  ///< indexed by LinkId
  std::vector<FlowTiming> timings;        ///< same order as the input flows

  std::uint64_t total_link_flits() const;
  std::uint64_t max_link_flits() const;
  LinkId bottleneck_link() const;  ///< most loaded link (lowest id on ties)
};

/// Conflict-free static schedule of one slot's flows. Flows are placed in
/// descending volume order (ties by flow id) at the earliest cycle where
/// every link they occupy is free for their whole latency.
CommResult comm_makespan(const Topology3D& topo, std::span<const Flow> flows, const LinkParams& lp);

}  // namespace regraphx

#include "regraphx/flows.hpp"

#include <algorithm>

#include "regraphx/error.hpp"

namespace regraphx {

namespace {

std::uint64_t share(std::uint64_t total, std::size_t parts, std::size_t i) {
  return total / parts + (i < total % parts ? 1 : 0);
}

std::uint64_t whole_flits(std::uint64_t bits, std::size_t flit_bits) {
  return (bits + flit_bits - 1) / flit_bits * flit_bits;
}

const std::vector<TileId>& tiles_for(const Mapping& m, std::size_t stage) {
  if (stage >= m.assignment.size() || m.assignment[stage].empty()) {
    throw InvalidArgument("gen_flows: stage " + std::to_string(stage) + " is unmapped");
  }
  return m.assignment[stage];
}

}  // namespace

std::vector<Flow> gen_flows(const StageGraph& sg, std::span<const StageWork> works,
                            const Mapping& mapping, RoutingMode mode, std::size_t flit_bits,
                            std::size_t slot, std::span<const std::size_t> only_stages) {
  if (works.size() != sg.size()) throw InvalidArgument("gen_flows: one StageWork per stage required");
  if (flit_bits < 1) throw InvalidArgument("gen_flows: flit_bits must be >= 1");
  std::vector<Flow> flows;
  auto emit = [&](std::size_t stage, TileId src, std::vector<TileId> dsts, std::uint64_t bits) {
    if (bits == 0 || dsts.empty()) return;
    Flow f;
    f.id = flows.size();
    f.src_tile = src;
    f.dst_tiles = std::move(dsts);
    f.volume_bits = whole_flits(bits, flit_bits);
    f.slot = slot;
    f.mode = mode;
    f.stage = stage;
    flows.push_back(std::move(f));
  };

  for (const auto& edge : sg.edges) {
    if (!only_stages.empty() &&
        std::find(only_stages.begin(), only_stages.end(), edge.producer) == only_stages.end()) {
      continue;
    }
    const std::uint64_t volume = works[edge.producer].output_bits;
    const auto& producers = tiles_for(mapping, edge.producer);
    std::vector<TileId> consumers;
    for (auto c : edge.consumers) {
      const auto& t = tiles_for(mapping, c);
      consumers.insert(consumers.end(), t.begin(), t.end());
    }
    if (volume == 0) continue;

    for (std::size_t i = 0; i < producers.size(); ++i) {
      const TileId src = producers[i];
      const std::uint64_t slice = share(volume, producers.size(), i);
      if (edge.edge_class == EdgeClass::Partition) {
        for (std::size_t j = 0; j < consumers.size(); ++j) {
          if (consumers[j] == src) continue;
          emit(edge.producer, src, {consumers[j]}, share(slice, consumers.size(), j));
        }
        continue;
      }
      std::vector<TileId> dsts = consumers;
      std::sort(dsts.begin(), dsts.end());
      dsts.erase(std::unique(dsts.begin(), dsts.end()), dsts.end());
      dsts.erase(std::remove(dsts.begin(), dsts.end(), src), dsts.end());
      if (mode == RoutingMode::Multicast) {
        emit(edge.producer, src, std::move(dsts), slice);
      } else {
        for (TileId d : dsts) emit(edge.producer, src, {d}, slice);
      }
    }
  }
  return flows;
}

}  // namespace regraphx

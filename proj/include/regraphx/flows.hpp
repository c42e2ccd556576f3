#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "regraphx/mapper.hpp"
#include "regraphx/noc.hpp"
#include "regraphx/workload.hpp"

namespace regraphx {

/// NoC flows of one batch's stage graph under a mapping.
///
/// Each producer tile holds an equal slice of the stage output. Partition
/// edges unicast the slice split evenly over the consumer tiles. Replicate
/// edges send the whole slice to every consumer tile: one tree flow in
/// multicast mode, one copy per consumer tile in unicast mode. Volumes are
/// rounded up to whole flits; empty pieces and self-deliveries are dropped.
/// If only_stages is nonempty, only edges leaving those stages are emitted.
std::vector<Flow> gen_flows(const StageGraph& sg, std::span<const StageWork> works,
                            const Mapping& mapping, RoutingMode mode, std::size_t flit_bits,
                            std::size_t slot = 0, std::span<const std::size_t> only_stages = {});

}  // namespace regraphx

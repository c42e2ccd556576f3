#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace regraphx {

struct StageWork;

/// One ReRAM tile type. Field names follow the hardware table of the
/// architecture: a tile holds imas_per_tile IMAs, each with
/// crossbars_per_ima crossbars of crossbar_size x crossbar_size cells.
struct TileSpec {
  std::size_t crossbar_size = 128;
  std::size_t crossbars_per_ima = 8;
  std::size_t imas_per_tile = 12;
  double frequency_hz = 10e6;
  std::size_t cell_bits = 2;
  std::size_t adcs_per_ima = 8;
  std::size_t adc_bits = 8;
  std::size_t dacs_per_ima = 128 * 8;
  std::size_t dac_bits = 1;
  std::size_t input_bits = 16;
  std::size_t weight_bits = 16;
  std::size_t overhead_cycles = 0;    ///< extra cycles per crossbar op (sensitivity knob)
  std::size_t row_write_cycles = 100;  ///< cycles to program one crossbar row

  /// Physical crossbars per tile.
  std::size_t capacity() const noexcept { return imas_per_tile * crossbars_per_ima; }
  /// DACs driving one crossbar / ADC conversions per crossbar op.
  std::size_t dacs_per_crossbar() const noexcept { return crossbar_size; }
  std::size_t adcs_per_op() const noexcept { return crossbar_size; }

  void validate() const;
  bool operator==(const TileSpec&) const = default;

  static TileSpec vpe_default();
  static TileSpec epe_default();
};

/// Energy constants. The shipped defaults are placeholders chosen to be
/// editable from config, not measured values.
struct EnergyParams {
  double e_xbar_op = 1.0e-12;     ///< J per crossbar operation (array read)
  double e_adc = 2.0e-12;         ///< J per ADC conversion
  double e_dac = 4.0e-15;         ///< J per DAC conversion (1-bit)
  double e_router_hop = 20.0e-12; ///< J per flit per router traversal
  double e_link_hop = 12.0e-12;   ///< J per flit per mesh link
  double e_write_cell = 10.0e-12; ///< J per ReRAM cell write

  void validate() const;
  bool operator==(const EnergyParams&) const = default;
};

/// Cells-per-value replication when a value_bits datum is sliced across
/// cell_bits-wide cells.
constexpr std::size_t bit_slices(std::size_t value_bits, std::size_t cell_bits) {
  return (value_bits + cell_bits - 1) / cell_bits;
}

/// Physical crossbars holding one copy of a d_in x d_out weight matrix.
std::size_t crossbars_needed(std::size_t d_in, std::size_t d_out, const TileSpec& spec);

/// Latency of one bit-serial crossbar operation in seconds.
double op_time(const TileSpec& spec);

/// Seconds to run work on alloc_units parallel logical crossbars.
double compute_time(const StageWork& work, std::size_t alloc_units, const TileSpec& spec);
double compute_time(std::uint64_t logical_ops, std::size_t alloc_units, const TileSpec& spec);

/// Compute-side energy in joules (NoC energy is accounted separately).
double compute_energy(const StageWork& work, const TileSpec& spec, const EnergyParams& ep);
double compute_energy(std::uint64_t logical_ops, const TileSpec& spec, const EnergyParams& ep);

/// Parallel logical crossbar groups available to a stage that owns
/// allocated_crossbars and whose data needs one_copy_crossbars per copy, split
/// into blocks independent M x M blocks. Spare crossbars hold extra copies.
std::size_t logical_units(std::size_t allocated_crossbars, std::size_t one_copy_crossbars,
                          std::size_t blocks);

/// Tiles and parallel units granted to one stage.
struct StageAllocation {
  std::vector<std::size_t> tiles;
  std::size_t logical_units = 1;
};

using Allocation = std::vector<StageAllocation>;

}  // namespace regraphx

#include "regraphx/hw_model.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "regraphx/error.hpp"
#include "regraphx/workload.hpp"

namespace regraphx {

void TileSpec::validate() const {
  const std::pair<const char*, std::size_t> counts[] = {
      {"crossbar_size", crossbar_size}, {"crossbars_per_ima", crossbars_per_ima},
      {"imas_per_tile", imas_per_tile}, {"cell_bits", cell_bits},
      {"adcs_per_ima", adcs_per_ima},   {"adc_bits", adc_bits},
      {"dacs_per_ima", dacs_per_ima},   {"dac_bits", dac_bits},
      {"input_bits", input_bits},       {"weight_bits", weight_bits}};
  for (const auto& [name, value] : counts) {
    if (value < 1) throw ConfigError(std::string("tile spec: ") + name + " must be >= 1");
  }
  if (!(frequency_hz > 0.0)) throw ConfigError("tile spec: frequency_hz must be > 0");
}

TileSpec TileSpec::vpe_default() { return TileSpec{}; }

TileSpec TileSpec::epe_default() {
  TileSpec s;
  s.crossbar_size = 8;
  s.adc_bits = 6;
  s.dacs_per_ima = 8 * 8;
  return s;
}

void EnergyParams::validate() const {
  for (double v : {e_xbar_op, e_adc, e_dac, e_router_hop, e_link_hop, e_write_cell}) {
    if (!(v >= 0.0)) throw ConfigError("energy parameters must be >= 0");
  }
}

std::size_t crossbars_needed(std::size_t d_in, std::size_t d_out, const TileSpec& spec) {
  const std::size_t m = spec.crossbar_size;
  return ((d_in + m - 1) / m) * ((d_out + m - 1) / m) * bit_slices(spec.weight_bits, spec.cell_bits);
}

double op_time(const TileSpec& spec) {
  return static_cast<double>(spec.input_bits + spec.overhead_cycles) / spec.frequency_hz;
}

double compute_time(std::uint64_t logical_ops, std::size_t alloc_units, const TileSpec& spec) {
  if (alloc_units < 1) throw InvalidArgument("compute_time: alloc_units must be >= 1");
  const std::uint64_t rounds = (logical_ops + alloc_units - 1) / alloc_units;
  return static_cast<double>(rounds) * op_time(spec);
}

double compute_time(const StageWork& work, std::size_t alloc_units, const TileSpec& spec) {
  return compute_time(work.logical_ops, alloc_units, spec);
}

double compute_energy(std::uint64_t logical_ops, const TileSpec& spec, const EnergyParams& ep) {
  const double per_op = ep.e_xbar_op +
                        static_cast<double>(spec.input_bits) *
                            (static_cast<double>(spec.dacs_per_crossbar()) * ep.e_dac) +
                        static_cast<double>(spec.adcs_per_op()) * ep.e_adc;
  return static_cast<double>(logical_ops) * per_op;
}

double compute_energy(const StageWork& work, const TileSpec& spec, const EnergyParams& ep) {
  return compute_energy(work.logical_ops, spec, ep);
}

std::size_t logical_units(std::size_t allocated_crossbars, std::size_t one_copy_crossbars,
                          std::size_t blocks) {
  if (one_copy_crossbars == 0 || blocks == 0) return 1;
  const std::size_t copies = std::max<std::size_t>(1, allocated_crossbars / one_copy_crossbars);
  return copies * blocks;
}

}  // namespace regraphx

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "regraphx/error.hpp"
#include "regraphx/experiment.hpp"
#include "regraphx/rng.hpp"

namespace regraphx {

namespace {

/// Reads fields of one JSON object, rejecting unknown keys and wrong types.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const Json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where(key) + " must be a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      if (v.is_number_unsigned()) {
        out = static_cast<T>(v.get<std::uint64_t>());
      } else {
        const auto s = v.get<std::int64_t>();
        if (s < 0) throw ConfigError(where(key) + " must be >= 0");
        out = static_cast<T>(s);
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
      out = v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
      out = v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

  std::string where(const std::string& key = {}) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + where(key) + "'");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json tile_to_json(const TileSpec& t) {
  return Json{{"crossbar_size", t.crossbar_size},   {"crossbars_per_ima", t.crossbars_per_ima},
              {"imas_per_tile", t.imas_per_tile},   {"frequency_hz", t.frequency_hz},
              {"cell_bits", t.cell_bits},           {"adcs_per_ima", t.adcs_per_ima},
              {"adc_bits", t.adc_bits},             {"dacs_per_ima", t.dacs_per_ima},
              {"dac_bits", t.dac_bits},             {"input_bits", t.input_bits},
              {"weight_bits", t.weight_bits},       {"overhead_cycles", t.overhead_cycles},
              {"row_write_cycles", t.row_write_cycles}};
}

TileSpec tile_from_json(const Json& j, const std::string& path, TileSpec t) {
  ObjectReader r(j, path);
  r.get("crossbar_size", t.crossbar_size);
  r.get("crossbars_per_ima", t.crossbars_per_ima);
  r.get("imas_per_tile", t.imas_per_tile);
  r.get("frequency_hz", t.frequency_hz);
  r.get("cell_bits", t.cell_bits);
  r.get("adcs_per_ima", t.adcs_per_ima);
  r.get("adc_bits", t.adc_bits);
  r.get("dacs_per_ima", t.dacs_per_ima);
  r.get("dac_bits", t.dac_bits);
  r.get("input_bits", t.input_bits);
  r.get("weight_bits", t.weight_bits);
  r.get("overhead_cycles", t.overhead_cycles);
  r.get("row_write_cycles", t.row_write_cycles);
  r.finish();
  return t;
}

template <typename T>
std::vector<T> size_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array");
  std::vector<T> out;
  for (const auto& e : v) {
    if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
      throw ConfigError(where + " entries must be non-negative integers");
    }
    out.push_back(static_cast<T>(e.get<std::uint64_t>()));
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  const bool has_path = !graph.path.empty();
  if (has_path == graph.synthetic.has_value()) {
    throw ConfigError("graph: exactly one of 'path' and 'synthetic' must be given");
  }
  if (graph.synthetic && graph.synthetic->num_nodes < 1) throw ConfigError("graph.synthetic: num_nodes must be >= 1");
  gnn.validate();
  if (graph.feature_dim != 0 && graph.feature_dim != gnn.layer_dims.front()) {
    throw ConfigError("graph.feature_dim " + std::to_string(graph.feature_dim) + " does not match gnn.layer_dims[0] " +
                      std::to_string(gnn.layer_dims.front()));
  }
  if (num_parts < 1) throw ConfigError("num_parts must be >= 1");
  if (beta < 1 || beta > num_parts) throw ConfigError("beta must lie in [1, num_parts]");
  hardware.vpe.validate();
  hardware.epe.validate();
  if (hardware.adjacency_value_bits < 1) throw ConfigError("hardware: adjacency_value_bits must be >= 1");
  energy.validate();
  noc.link.validate();
  if (!(noc.weights.planar >= 0.0) || !(noc.weights.vertical >= 0.0)) {
    throw ConfigError("noc: link weights must be >= 0");
  }
  sa.validate();
  const Topology3D topo = noc.topology();
  if (topo.count_tiles(TierKind::V) != hardware.vpe_count) {
    throw ConfigError("hardware.vpe_count " + std::to_string(hardware.vpe_count) + " does not match the " +
                      std::to_string(topo.count_tiles(TierKind::V)) + " V-tier tiles of the topology");
  }
  if (topo.count_tiles(TierKind::E) != hardware.epe_count) {
    throw ConfigError("hardware.epe_count " + std::to_string(hardware.epe_count) + " does not match the " +
                      std::to_string(topo.count_tiles(TierKind::E)) + " E-tier tiles of the topology");
  }
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json graph;
  if (!cfg.graph.path.empty()) graph["path"] = cfg.graph.path;
  if (cfg.graph.synthetic) {
    const auto& s = *cfg.graph.synthetic;
    graph["synthetic"] = Json{{"kind", to_string(s.kind)},
                              {"num_nodes", s.num_nodes},
                              {"exponent", s.params.exponent},
                              {"avg_degree", s.params.avg_degree},
                              {"edge_prob", s.params.edge_prob},
                              {"grid_width", s.params.grid_width}};
  }
  graph["self_loops"] = cfg.graph.self_loops;
  graph["feature_dim"] = cfg.graph.feature_dim;

  Json tiers = Json::array();
  for (auto t : cfg.noc.tiers) tiers.push_back(to_string(t));

  Json sa{{"initial_temp", cfg.sa.initial_temp},
          {"cooling_rate", cfg.sa.cooling_rate},
          {"iterations_per_temp", cfg.sa.iterations_per_temp},
          {"min_temp_ratio", cfg.sa.min_temp_ratio}};
  if (cfg.sa.max_iterations != SIZE_MAX) sa["max_iterations"] = cfg.sa.max_iterations;

  return Json{
      {"name", cfg.name},
      {"seed", cfg.seed},
      {"graph", graph},
      {"gnn", {{"layer_dims", cfg.gnn.layer_dims},
               {"value_bits", cfg.gnn.value_bits},
               {"bv1_multiplier", cfg.gnn.bv1_multiplier}}},
      {"epochs", cfg.gnn.num_epochs},
      {"num_parts", cfg.num_parts},
      {"beta", cfg.beta},
      {"hardware", {{"vpe", tile_to_json(cfg.hardware.vpe)},
                    {"epe", tile_to_json(cfg.hardware.epe)},
                    {"vpe_count", cfg.hardware.vpe_count},
                    {"epe_count", cfg.hardware.epe_count},
                    {"epe_in_flight", cfg.hardware.epe_in_flight},
                    {"adjacency_reload", cfg.hardware.adjacency_reload},
                    {"adjacency_value_bits", cfg.hardware.adjacency_value_bits}}},
      {"noc", {{"mesh_x", cfg.noc.mesh_x},
               {"mesh_y", cfg.noc.mesh_y},
               {"tiers", tiers},
               {"tiles_per_router", cfg.noc.tiles_per_router},
               {"flit_bits", cfg.noc.link.flit_bits},
               {"link_rate", cfg.noc.link.link_rate},
               {"router_delay", cfg.noc.link.router_delay},
               {"frequency_hz", cfg.noc.link.noc_frequency_hz},
               {"planar_weight", cfg.noc.weights.planar},
               {"vertical_weight", cfg.noc.weights.vertical}}},
      {"energy", {{"e_xbar_op", cfg.energy.e_xbar_op},
                  {"e_adc", cfg.energy.e_adc},
                  {"e_dac", cfg.energy.e_dac},
                  {"e_router_hop", cfg.energy.e_router_hop},
                  {"e_link_hop", cfg.energy.e_link_hop},
                  {"e_write_cell", cfg.energy.e_write_cell}}},
      {"routing", to_string(cfg.routing)},
      {"sa", sa},
  };
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  ObjectReader top(j, "");
  top.get("name", cfg.name);
  top.get("seed", cfg.seed);
  top.get("num_parts", cfg.num_parts);
  top.get("beta", cfg.beta);
  top.get("epochs", cfg.gnn.num_epochs);

  if (!top.has("graph")) throw ConfigError("missing required key 'graph'");
  {
    ObjectReader r(top.raw("graph"), "graph");
    r.get("path", cfg.graph.path);
    r.get("self_loops", cfg.graph.self_loops);
    r.get("feature_dim", cfg.graph.feature_dim);
    if (r.has("synthetic")) {
      ObjectReader s(r.raw("synthetic"), "graph.synthetic");
      SyntheticSpec spec;
      std::string kind = to_string(spec.kind);
      s.get("kind", kind);
      try {
        spec.kind = synthetic_kind_from_string(kind);
      } catch (const Error& e) {
        throw ConfigError("graph.synthetic.kind: " + e.message());
      }
      s.get("num_nodes", spec.num_nodes);
      s.get("exponent", spec.params.exponent);
      s.get("avg_degree", spec.params.avg_degree);
      s.get("edge_prob", spec.params.edge_prob);
      s.get("grid_width", spec.params.grid_width);
      s.finish();
      cfg.graph.synthetic = spec;
    }
    r.finish();
  }

  if (top.has("gnn")) {
    ObjectReader r(top.raw("gnn"), "gnn");
    if (r.has("layer_dims")) cfg.gnn.layer_dims = size_list<std::size_t>(r.raw("layer_dims"), "gnn.layer_dims");
    r.get("value_bits", cfg.gnn.value_bits);
    r.get("bv1_multiplier", cfg.gnn.bv1_multiplier);
    r.finish();
  }

  if (top.has("hardware")) {
    ObjectReader r(top.raw("hardware"), "hardware");
    if (r.has("vpe")) cfg.hardware.vpe = tile_from_json(r.raw("vpe"), "hardware.vpe", cfg.hardware.vpe);
    if (r.has("epe")) cfg.hardware.epe = tile_from_json(r.raw("epe"), "hardware.epe", cfg.hardware.epe);
    r.get("vpe_count", cfg.hardware.vpe_count);
    r.get("epe_count", cfg.hardware.epe_count);
    r.get("epe_in_flight", cfg.hardware.epe_in_flight);
    r.get("adjacency_reload", cfg.hardware.adjacency_reload);
    r.get("adjacency_value_bits", cfg.hardware.adjacency_value_bits);
    r.finish();
  }

  if (top.has("noc")) {
    ObjectReader r(top.raw("noc"), "noc");
    r.get("mesh_x", cfg.noc.mesh_x);
    r.get("mesh_y", cfg.noc.mesh_y);
    if (r.has("tiers")) {
      const Json& t = r.raw("tiers");
      if (!t.is_array()) throw ConfigError("noc.tiers must be an array");
      cfg.noc.tiers.clear();
      for (const auto& e : t) {
        if (!e.is_string()) throw ConfigError("noc.tiers entries must be \"E\" or \"V\"");
        try {
          cfg.noc.tiers.push_back(tier_kind_from_string(e.get<std::string>()));
        } catch (const Error& err) {
          throw ConfigError("noc.tiers: " + err.message());
        }
      }
    }
    r.get("tiles_per_router", cfg.noc.tiles_per_router);
    r.get("flit_bits", cfg.noc.link.flit_bits);
    r.get("link_rate", cfg.noc.link.link_rate);
    r.get("router_delay", cfg.noc.link.router_delay);
    r.get("frequency_hz", cfg.noc.link.noc_frequency_hz);
    r.get("planar_weight", cfg.noc.weights.planar);
    r.get("vertical_weight", cfg.noc.weights.vertical);
    r.finish();
  }

  if (top.has("energy")) {
    ObjectReader r(top.raw("energy"), "energy");
    r.get("e_xbar_op", cfg.energy.e_xbar_op);
    r.get("e_adc", cfg.energy.e_adc);
    r.get("e_dac", cfg.energy.e_dac);
    r.get("e_router_hop", cfg.energy.e_router_hop);
    r.get("e_link_hop", cfg.energy.e_link_hop);
    r.get("e_write_cell", cfg.energy.e_write_cell);
    r.finish();
  }

  if (top.has("routing")) {
    std::string mode;
    top.get("routing", mode);
    try {
      cfg.routing = routing_mode_from_string(mode);
    } catch (const Error& e) {
      throw ConfigError("routing: " + e.message());
    }
  }

  if (top.has("sa")) {
    ObjectReader r(top.raw("sa"), "sa");
    r.get("initial_temp", cfg.sa.initial_temp);
    r.get("cooling_rate", cfg.sa.cooling_rate);
    r.get("iterations_per_temp", cfg.sa.iterations_per_temp);
    r.get("min_temp_ratio", cfg.sa.min_temp_ratio);
    r.get("max_iterations", cfg.sa.max_iterations);
    r.finish();
  }
  top.finish();

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.message());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_to_json(cfg).dump())));
  return buf;
}

}  // namespace regraphx

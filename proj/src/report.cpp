#include <charconv>
#include <sstream>

#include "regraphx/error.hpp"
#include "regraphx/experiment.hpp"

namespace regraphx {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json mapping_to_json(const Mapping& m, const StageGraph& sg, const Topology3D& topo) {
  Json out = Json::array();
  for (const auto& s : sg.stages) {
    Json tiles = Json::array();
    for (TileId t : m.assignment.at(s.id)) {
      const Coord c = topo.coord(topo.router_of(t));
      tiles.push_back({{"tile", t}, {"router", {c.x, c.y, c.z}}});
    }
    out.push_back({{"stage", s.name()}, {"tiles", tiles}});
  }
  return out;
}

Mapping mapping_from_json(const Json& j, const StageGraph& sg) {
  const Json* list = &j;
  if (j.is_object()) {
    if (!j.contains("mapping")) throw ConfigError("mapping file has no 'mapping' entry");
    list = &j.at("mapping");
  }
  if (!list->is_array()) throw ConfigError("mapping must be an array of {stage, tiles}");
  Mapping m;
  m.assignment.resize(sg.size());
  std::vector<bool> seen(sg.size(), false);
  for (const auto& entry : *list) {
    if (!entry.is_object() || !entry.contains("stage") || !entry.contains("tiles") || !entry["stage"].is_string() ||
        !entry["tiles"].is_array()) {
      throw ConfigError("mapping entries need a 'stage' name and a 'tiles' array");
    }
    const auto name = entry["stage"].get<std::string>();
    std::size_t id = sg.size();
    for (const auto& s : sg.stages) {
      if (s.name() == name) id = s.id;
    }
    if (id == sg.size()) throw ConfigError("mapping names unknown stage '" + name + "'");
    if (seen[id]) throw ConfigError("mapping lists stage '" + name + "' twice");
    seen[id] = true;
    for (const auto& t : entry["tiles"]) {
      const Json& v = t.is_object() && t.contains("tile") ? t["tile"] : t;
      if (!v.is_number_unsigned()) throw ConfigError("mapping tile ids must be non-negative integers");
      m.assignment[id].push_back(v.get<std::size_t>());
    }
  }
  return m;
}

Json report_to_json(const SimReport& r, const Topology3D& topo, const StageGraph& sg) {
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"id", s.id},
                      {"name", s.name},
                      {"kind", to_string(s.kind)},
                      {"phase", to_string(s.phase)},
                      {"layer", s.layer},
                      {"tiles", s.tiles},
                      {"logical_units", s.logical_units},
                      {"macs", s.macs},
                      {"logical_ops", s.logical_ops},
                      {"max_output_bits", s.max_output_bits},
                      {"compute_s", s.compute_s},
                      {"comm_s", s.comm_s},
                      {"comm_cycles", s.comm_cycles},
                      {"stage_time_s", std::max(s.compute_s, s.comm_s)},
                      {"compute_energy_j", s.compute_energy_j}});
  }
  Json links = Json::array();
  for (const auto& l : r.top_links) links.push_back({{"link", l.link}, {"flits", l.flits}, {"utilization", l.utilization}});
  Json slots = Json::array();
  for (const auto& s : r.slots) slots.push_back({{"slot", s.slot}, {"cycles", s.cycles}, {"link_flits", s.link_flits}});
  Json slot_stages = Json::array();
  for (const auto& s : r.slot_stages) {
    slot_stages.push_back({{"slot", s.slot},
                           {"stage", s.stage},
                           {"batch", s.batch},
                           {"comm_cycles", s.comm_cycles},
                           {"bottleneck_link", s.bottleneck_link},
                           {"max_link_flits", s.max_link_flits}});
  }
  const auto& b = r.stages.at(r.bottleneck_stage);
  return Json{
      {"name", r.name},
      {"routing", to_string(r.mode)},
      {"graph", {{"num_nodes", r.num_nodes}, {"num_edges", r.num_edges}, {"edge_cut", r.edge_cut}}},
      {"num_parts", r.num_parts},
      {"beta", r.beta},
      {"num_inputs", r.num_inputs},
      {"epochs", r.epochs},
      {"stages", stages},
      {"bottleneck", {{"stage", b.id}, {"name", b.name}, {"kind", to_string(b.kind)}, {"bound", to_string(r.bound)}}},
      {"slot_time_s", r.slot_time_s},
      {"makespan_s", r.makespan_s},
      {"energy", {{"compute_j", r.energy_compute_j},
                  {"noc_j", r.energy_noc_j},
                  {"write_j", r.energy_write_j},
                  {"total_j", r.energy_total_j}}},
      {"edp", r.edp},
      {"epe_requirement", r.epe_requirement},
      {"max_batch_nodes", r.max_batch_nodes},
      {"max_batch_tiles", r.max_batch_tiles},
      {"zeros", {{"M", r.zeros.M},
                 {"nonempty_tiles", r.zeros.nonempty_tiles},
                 {"stored_zeros", r.zeros.stored_zeros},
                 {"nnz", r.zeros.nnz}}},
      {"total_link_flits", r.total_link_flits},
      {"top_links", links},
      {"slots", slots},
      {"slot_stages", slot_stages},
      {"sa", {{"initial_cost", r.sa_initial_cost},
              {"best_cost", r.sa_best_cost},
              {"iterations", r.sa_iterations},
              {"mapping_from_file", r.mapping_from_file}}},
      {"mapping", mapping_to_json(r.mapping, sg, topo)},
      {"provenance", {{"config_hash", r.provenance.config_hash},
                      {"seed", r.provenance.seed},
                      {"tool_version", r.provenance.tool_version},
                      {"timestamp", r.provenance.timestamp}}},
  };
}

std::string report_json_text(const SimReport& r, const Topology3D& topo, const StageGraph& sg) {
  return report_to_json(r, topo, sg).dump(2) + "\n";
}

std::string summary_csv(const SimReport& r) {
  std::ostringstream out;
  out << "stage_id,stage,kind,phase,layer,num_tiles,logical_units,macs,logical_ops,max_output_bits,"
         "compute_s,comm_s,comm_cycles,stage_time_s,compute_energy_j\n";
  for (const auto& s : r.stages) {
    out << s.id << ',' << s.name << ',' << to_string(s.kind) << ',' << to_string(s.phase) << ',' << s.layer << ','
        << s.tiles.size() << ',' << s.logical_units << ',' << s.macs << ',' << s.logical_ops << ','
        << s.max_output_bits << ',' << format_double(s.compute_s) << ',' << format_double(s.comm_s) << ','
        << s.comm_cycles << ',' << format_double(std::max(s.compute_s, s.comm_s)) << ','
        << format_double(s.compute_energy_j) << '\n';
  }
  return out.str();
}

std::string sweep_csv(SweepParam param, const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "param,value,status,num_inputs,makespan_s,norm_makespan_s,energy_j,norm_energy_j,edp,norm_edp,"
         "epe_requirement,norm_epe_requirement,stored_zeros,norm_stored_zeros,max_comm_s,norm_max_comm_s,"
         "bottleneck_stage,error\n";
  auto max_comm = [](const SimReport& r) {
    double m = 0.0;
    for (const auto& s : r.stages) m = std::max(m, s.comm_s);
    return m;
  };
  auto metrics = [&](const SimReport& r) {
    return std::vector<double>{r.makespan_s, r.energy_total_j, r.edp, static_cast<double>(r.epe_requirement),
                               static_cast<double>(r.zeros.stored_zeros), max_comm(r)};
  };
  const SimReport* ref = points.empty() || !points.front().report ? nullptr : &*points.front().report;
  for (const auto& p : points) {
    out << to_string(param) << ',' << p.value << ',';
    if (!p.report) {
      std::string msg = p.error;
      for (auto& c : msg) {
        if (c == '"') c = '\'';
        if (c == '\n') c = ' ';
      }
      out << "failed,,,,,,,,,,,,,,,\"" << msg << "\"\n";
      continue;
    }
    const auto m = metrics(*p.report);
    const auto m0 = ref ? metrics(*ref) : std::vector<double>{};
    auto norm = [&](std::size_t i) { return ref ? format_double(m[i] / m0[i]) : std::string(); };
    out << "ok," << p.report->num_inputs << ',' << format_double(m[0]) << ',' << norm(0) << ','
        << format_double(m[1]) << ',' << norm(1) << ',' << format_double(m[2]) << ',' << norm(2) << ','
        << p.report->epe_requirement << ',' << norm(3) << ',' << p.report->zeros.stored_zeros << ',' << norm(4)
        << ',' << format_double(m[5]) << ',' << norm(5) << ',' << p.report->stages.at(p.report->bottleneck_stage).name
        << ",\n";
  }
  return out.str();
}

std::string compare_routing_csv(const RoutingComparison& c) {
  std::ostringstream out;
  out << "slot,stage,mode,comm_cycles,bottleneck_link,max_link_flits\n";
  for (const SimReport* r : {&c.unicast, &c.multicast}) {
    for (const auto& row : r->slot_stages) {
      out << row.slot << ',' << r->stages.at(row.stage).name << ',' << to_string(r->mode) << ',' << row.comm_cycles
          << ',' << row.bottleneck_link << ',' << row.max_link_flits << '\n';
    }
  }
  return out.str();
}

std::string tile_stats_csv(const std::vector<TileStatsRow>& rows) {
  std::ostringstream out;
  out << "dataset,M,nonempty_tiles,nnz,stored_zeros,normalized_zeros\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.stats.M << ',' << r.stats.nonempty_tiles << ',' << r.stats.nnz << ','
        << r.stats.stored_zeros << ',' << format_double(r.normalized_zeros) << '\n';
  }
  return out.str();
}

}  // namespace regraphx

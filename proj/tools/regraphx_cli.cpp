// Command-line front end: simulate, sweep, tile-stats, compare-routing.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "regraphx/error.hpp"
#include "regraphx/experiment.hpp"

namespace fs = std::filesystem;
using namespace regraphx;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kCapacity = 3, kRuntime = 4 };

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

ExperimentConfig config_with_seed(const std::string& path, const std::optional<std::uint64_t>& seed) {
  ExperimentConfig cfg = load_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

std::optional<Mapping> read_mapping(const std::string& path, const StageGraph& sg) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mapping file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("mapping file " + path + ": " + e.what());
  }
  return mapping_from_json(j, sg);
}

int run_simulate(const std::string& config, const std::optional<std::uint64_t>& seed, const std::string& out_dir,
                 const std::string& mapping_in) {
  Simulation sim(config_with_seed(config, seed));
  sim.map(read_mapping(mapping_in, sim.stage_graph()));
  const SimReport r = sim.evaluate(sim.config().routing);
  const fs::path dir(out_dir);
  write_file(dir / "report.json", report_json_text(r, sim.topology(), sim.stage_graph()));
  write_file(dir / "summary.csv", summary_csv(r));
  write_file(dir / "mapping.json",
             Json{{"mapping", mapping_to_json(r.mapping, sim.stage_graph(), sim.topology())}}.dump(2) + "\n");
  const auto& b = r.stages.at(r.bottleneck_stage);
  std::cout << "stages " << r.stages.size() << ", inputs " << r.num_inputs << ", makespan "
            << format_double(r.makespan_s) << " s, energy " << format_double(r.energy_total_j) << " J, EDP "
            << format_double(r.edp) << " J*s\n"
            << "bottleneck " << b.name << " (" << to_string(r.bound) << "), E-PEs required " << r.epe_requirement
            << "\nwrote " << (dir / "report.json").string() << '\n';
  return kOk;
}

int run_sweep(const std::string& config, const std::optional<std::uint64_t>& seed, const std::string& param,
              const std::vector<std::string>& values, const std::string& out_dir) {
  const ExperimentConfig cfg = config_with_seed(config, seed);
  const SweepParam p = sweep_param_from_string(param);
  const auto points = sweep(cfg, p, values);
  const std::string csv = sweep_csv(p, points);
  write_file(fs::path(out_dir) / "sweep.csv", csv);
  std::cout << csv;
  for (const auto& pt : points) {
    if (!pt.report) std::cerr << "point " << param << "=" << pt.value << " failed: " << pt.error << '\n';
  }
  return kOk;
}

int run_tile_stats(const std::string& graph, const std::vector<std::size_t>& sizes, std::size_t parts,
                   std::uint64_t seed, bool self_loops, const std::string& out) {
  const Graph g = load_edge_list(graph);
  const auto rows = tile_stats(fs::path(graph).stem().string(), g, sizes, parts, seed, self_loops);
  const std::string csv = tile_stats_csv(rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  return kOk;
}

int run_compare(const std::string& config, const std::optional<std::uint64_t>& seed, const std::string& out) {
  const RoutingComparison c = compare_routing(config_with_seed(config, seed));
  const std::string csv = compare_routing_csv(c);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  std::cerr << "mean unicast communication penalty: " << format_double(100.0 * c.mean_unicast_penalty) << "%\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator of a heterogeneous ReRAM + 3D NoC accelerator for GNN training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(REGRAPHX_VERSION));

  std::string config, out_dir = ".", mapping_in, param, graph, out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> values;
  std::vector<std::size_t> sizes{8, 128};
  std::size_t parts = 1;
  std::uint64_t ts_seed = 1;
  bool self_loops = false;

  auto* sim = app.add_subcommand("simulate", "Run one experiment and write report.json, summary.csv, mapping.json");
  sim->add_option("--config", config, "Experiment config (JSON)")->required();
  sim->add_option("--seed", seed, "Override the root seed");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--mapping-in", mapping_in, "Replay a mapping (mapping.json or report.json)");

  auto* sw = app.add_subcommand("sweep", "Sweep one parameter and write sweep.csv");
  sw->add_option("--config", config, "Experiment config (JSON)")->required();
  sw->add_option("--param", param, "beta | epe_crossbar_size | routing_mode")->required();
  sw->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--seed", seed, "Override the root seed");
  sw->add_option("--out", out_dir, "Output directory");

  auto* ts = app.add_subcommand("tile-stats", "Stored-zero statistics of an edge list at several crossbar sizes");
  ts->add_option("--graph", graph, "Edge-list file")->required();
  ts->add_option("--sizes", sizes, "Comma-separated crossbar sizes")->delimiter(',');
  ts->add_option("--parts", parts, "Sum over the parts of a partition of this many parts");
  ts->add_option("--seed", ts_seed, "Partition seed");
  ts->add_flag("--self-loops", self_loops, "Add the diagonal before tiling");
  ts->add_option("--out", out, "CSV file (default: stdout)");

  auto* cr = app.add_subcommand("compare-routing", "Per-slot communication under unicast and multicast");
  cr->add_option("--config", config, "Experiment config (JSON)")->required();
  cr->add_option("--seed", seed, "Override the root seed");
  cr->add_option("--out", out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sim) return run_simulate(config, seed, out_dir, mapping_in);
    if (*sw) return run_sweep(config, seed, param, values, out_dir);
    if (*ts) return run_tile_stats(graph, sizes, parts, ts_seed, self_loops, out);
    if (*cr) return run_compare(config, seed, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kCapacity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}

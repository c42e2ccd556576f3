#include "regraphx/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <numeric>

#include "regraphx/error.hpp"
#include "regraphx/flows.hpp"
#include "regraphx/rng.hpp"

#ifndef REGRAPHX_VERSION
#define REGRAPHX_VERSION "unknown"
#endif

namespace regraphx {

namespace {

template <typename F>
decltype(auto) in_phase(const char* phase, F&& f) {
  try {
    return f();
  } catch (Error& e) {
    e.tag_phase(phase);
    throw;
  } catch (const std::exception& e) {
    Error err(e.what());
    err.tag_phase(phase);
    throw err;
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_bv1(const Stage& s) { return s.kind == StageKind::V && s.phase == Phase::Backward && s.layer == 1; }

}  // namespace

Simulation::Simulation(ExperimentConfig cfg)
    : cfg_(std::move(cfg)), topo_(Topology3D::regraphx_default()) {
  in_phase("config", [&] {
    cfg_.validate();
    topo_ = cfg_.noc.topology();
  });

  graph_ = in_phase("load", [&] {
    Graph g;
    if (cfg_.graph.synthetic) {
      const auto& s = *cfg_.graph.synthetic;
      g = generate_synthetic(s.kind, s.num_nodes, s.params, derive_seed(cfg_.seed, "synth"));
    } else {
      g = load_edge_list(cfg_.graph.path);
    }
    g.set_feature_dim(cfg_.gnn.layer_dims.front());
    return g;
  });

  in_phase("partition", [&] {
    if (cfg_.num_parts > graph_.num_nodes()) {
      throw ConfigError("num_parts " + std::to_string(cfg_.num_parts) + " exceeds the " +
                        std::to_string(graph_.num_nodes()) + " graph nodes");
    }
    parts_ = partition(graph_, cfg_.num_parts, derive_seed(cfg_.seed, "partition"));
  });

  in_phase("batch", [&] { batches_ = make_batches(graph_, parts_, cfg_.beta, derive_seed(cfg_.seed, "batch")); });

  sg_ = in_phase("stage_graph", [&] { return build_stage_graph(cfg_.gnn); });

  in_phase("tile", [&] {
    const auto& hw = cfg_.hardware;
    for (const auto& b : batches_) {
      const TileGrid grid = tile_adjacency(b.subgraph, hw.epe.crossbar_size, cfg_.graph.self_loops);
      zeros_.push_back(zero_stats(grid));
      works_.push_back(stage_works(sg_, b.subgraph, cfg_.gnn, grid, hw.vpe, hw.epe, hw.adjacency_value_bits));
    }
  });

  in_phase("allocate", [&] {
    for (std::size_t b = 1; b < batches_.size(); ++b) {
      if (batches_[b].subgraph.num_nodes() > batches_[rep_batch_].subgraph.num_nodes()) rep_batch_ = b;
    }
    problem_.stage_graph = &sg_;
    problem_.topology = &topo_;
    problem_.v_capacity = cfg_.hardware.vpe.capacity();
    problem_.e_capacity = cfg_.hardware.epe.capacity();
    problem_.demand.assign(sg_.size(), 0);
    for (const auto& w : works_) {
      for (std::size_t s = 0; s < sg_.size(); ++s) {
        problem_.demand[s] = std::max(problem_.demand[s], w[s].one_copy_crossbars);
      }
    }
  });
}

void Simulation::map(const std::optional<Mapping>& mapping_in) {
  in_phase("map", [&] {
    const auto& works = works_.at(rep_batch_);
    if (mapping_in) {
      if (const auto why = check_mapping(*mapping_in, problem_); !why.empty()) {
        throw ConfigError("mapping file rejected: " + why);
      }
      sa_ = SaResult{};
      sa_.best = *mapping_in;
      sa_.initial_cost = sa_.best_cost = mapping_cost(*mapping_in, sg_, works, topo_, cfg_.routing,
                                                      cfg_.noc.link.flit_bits, cfg_.noc.weights);
      mapping_from_file_ = true;
    } else {
      const Mapping m0 = initial_mapping(problem_);
      SaParams params = cfg_.sa;
      params.seed = derive_seed(cfg_.seed, "sa");
      SaContext ctx{problem_, works, cfg_.routing, cfg_.noc.link.flit_bits, cfg_.noc.weights};
      sa_ = sa_optimize(m0, params, ctx);
      mapping_from_file_ = false;
    }
    mapping_ = sa_.best;
    mapped_ = true;
  });
}

SimReport Simulation::evaluate(RoutingMode mode) const {
  if (!mapped_) throw Error("evaluate called before map");
  const auto& hw = cfg_.hardware;
  const auto& lp = cfg_.noc.link;
  const std::size_t S = sg_.size();
  const std::size_t N = batches_.size();
  const std::size_t epochs = cfg_.gnn.num_epochs;
  const double ep = static_cast<double>(epochs);

  SimReport r;
  r.name = cfg_.name;
  r.mode = mode;
  r.num_nodes = graph_.num_nodes();
  r.num_edges = graph_.num_edges();
  r.num_parts = parts_.num_parts();
  r.beta = cfg_.beta;
  r.num_inputs = N;
  r.epochs = epochs;
  r.edge_cut = edge_cut(graph_, parts_);
  r.mapping = mapping_;
  r.mapping_from_file = mapping_from_file_;
  r.sa_initial_cost = sa_.initial_cost;
  r.sa_best_cost = sa_.best_cost;
  r.sa_iterations = sa_.iterations;

  std::vector<StageTiming> timings(S);
  in_phase("energy", [&] {
    r.stages.resize(S);
    for (const auto& st : sg_.stages) {
      auto& row = r.stages[st.id];
      row.id = st.id;
      row.name = st.name();
      row.kind = st.kind;
      row.phase = st.phase;
      row.layer = st.layer;
      row.tiles = mapping_.assignment.at(st.id);
      const TileSpec& spec = st.kind == StageKind::V ? hw.vpe : hw.epe;
      const std::size_t alloc = row.tiles.size() * spec.capacity();
      const double mult = is_bv1(st) ? cfg_.gnn.bv1_multiplier : 1.0;
      for (std::size_t b = 0; b < N; ++b) {
        const StageWork& w = works_[b][st.id];
        // adjacency blocks are stored once; only V weights take extra copies
        const std::size_t budget = st.kind == StageKind::E ? w.one_copy_crossbars : alloc;
        const std::size_t units = logical_units(budget, w.one_copy_crossbars, w.blocks);
        double t = compute_time(w, units, spec) * mult;
        double e = compute_energy(w, spec, cfg_.energy) * mult;
        if (hw.adjacency_reload && st.kind == StageKind::E && w.one_copy_crossbars > 0) {
          t += static_cast<double>(spec.crossbar_size * spec.row_write_cycles) / spec.frequency_hz;
          const double cells = static_cast<double>(w.one_copy_crossbars * spec.crossbar_size * spec.crossbar_size);
          r.energy_write_j += cells * cfg_.energy.e_write_cell * ep;
        }
        row.compute_s = std::max(row.compute_s, t);
        row.compute_energy_j += e * ep;
        row.macs += w.macs;
        row.logical_ops += w.logical_ops;
        row.max_output_bits = std::max(row.max_output_bits, w.output_bits);
        if (b == rep_batch_) row.logical_units = units;
      }
      timings[st.id].compute = row.compute_s;
      r.energy_compute_j += row.compute_energy_j;
    }
  });

  in_phase("schedule", [&] {
    // flows of every (batch, stage) pair
    std::vector<std::vector<std::vector<Flow>>> flows(N, std::vector<std::vector<Flow>>(S));
    in_phase("flows", [&] {
      for (std::size_t b = 0; b < N; ++b) {
        for (auto& f : gen_flows(sg_, works_[b], mapping_, mode, lp.flit_bits)) flows[b][f.stage].push_back(std::move(f));
      }
    });

    std::vector<std::uint64_t> link_total(topo_.num_link_slots(), 0);
    std::uint64_t busy_cycles = 0;
    double noc_energy = 0.0;
    const std::size_t num_slots = N == 0 ? 0 : N + S - 1;
    for (std::size_t k = 0; k < num_slots; ++k) {
      std::vector<Flow> slot_flows;
      std::vector<std::size_t> active;
      for (std::size_t s = 0; s < S; ++s) {
        if (k < s || k - s >= N) continue;
        active.push_back(s);
        for (Flow f : flows[k - s][s]) {
          f.id = slot_flows.size();
          f.slot = k;
          slot_flows.push_back(std::move(f));
        }
      }
      const CommResult comm = comm_makespan(topo_, slot_flows, lp);
      busy_cycles += comm.cycles;
      for (std::size_t l = 0; l < link_total.size(); ++l) link_total[l] += comm.link_flits[l];
      r.slots.push_back({k, comm.cycles, comm.total_link_flits()});

      std::vector<SlotStageComm> rows;
      for (std::size_t s : active) rows.push_back({k, s, k - s, 0, "none", 0});
      for (std::size_t i = 0; i < slot_flows.size(); ++i) {
        const Flow& f = slot_flows[i];
        auto& row = *std::find_if(rows.begin(), rows.end(), [&](const SlotStageComm& x) { return x.stage == f.stage; });
        row.comm_cycles = std::max(row.comm_cycles, comm.timings[i].finish);
        const auto links = flow_links(topo_, f);
        const auto flits = static_cast<double>(flow_flits(f, lp));
        noc_energy += flits * (static_cast<double>(links.size()) * cfg_.energy.e_link_hop +
                               static_cast<double>(links.size() + 1) * cfg_.energy.e_router_hop);
        for (LinkId l : links) {
          if (comm.link_flits[l] > row.max_link_flits) {
            row.max_link_flits = comm.link_flits[l];
            row.bottleneck_link = topo_.link_name(l);
          }
        }
      }
      for (const auto& row : rows) {
        auto& sr = r.stages[row.stage];
        sr.comm_cycles = std::max(sr.comm_cycles, row.comm_cycles);
        r.slot_stages.push_back(row);
      }
    }
    r.energy_noc_j = noc_energy * ep;
    r.total_link_flits = std::accumulate(link_total.begin(), link_total.end(), std::uint64_t{0});

    std::vector<LinkId> order;
    for (LinkId l = 0; l < link_total.size(); ++l) {
      if (link_total[l] > 0) order.push_back(l);
    }
    std::stable_sort(order.begin(), order.end(), [&](LinkId a, LinkId b) { return link_total[a] > link_total[b]; });
    if (order.size() > 10) order.resize(10);
    for (LinkId l : order) {
      const double cap = lp.link_rate * static_cast<double>(busy_cycles);
      r.top_links.push_back({topo_.link_name(l), link_total[l], cap > 0.0 ? static_cast<double>(link_total[l]) / cap : 0.0});
    }
    for (auto& sr : r.stages) {
      sr.comm_s = static_cast<double>(sr.comm_cycles) / lp.noc_frequency_hz;
      timings[sr.id].comm = sr.comm_s;
    }
  });

  in_phase("pipeline", [&] {
    const MakespanResult mk = pipeline_makespan(timings, std::max<std::size_t>(N, 1), epochs);
    r.slot_time_s = mk.slot_time;
    r.makespan_s = mk.makespan;
    r.bottleneck_stage = mk.bottleneck_stage;
    r.bound = mk.bound;
  });

  const std::size_t in_flight = hw.epe_in_flight ? 2 * sg_.num_layers : 1;
  r.zeros.M = hw.epe.crossbar_size;
  for (std::size_t b = 0; b < N; ++b) {
    const auto& z = zeros_[b];
    r.zeros.nonempty_tiles += z.nonempty_tiles;
    r.zeros.stored_zeros += z.stored_zeros;
    r.zeros.nnz += z.nnz;
    r.epe_requirement = std::max(r.epe_requirement, epe_requirement(z.nonempty_tiles, hw.epe, hw.adjacency_value_bits));
    r.max_batch_tiles = std::max(r.max_batch_tiles, z.nonempty_tiles);
    r.max_batch_nodes = std::max(r.max_batch_nodes, batches_[b].subgraph.num_nodes());
  }
  r.epe_requirement *= in_flight;

  r.energy_total_j = r.energy_compute_j + r.energy_noc_j + r.energy_write_j;
  r.edp = r.makespan_s * r.energy_total_j;
  r.provenance = {config_hash(cfg_), cfg_.seed, REGRAPHX_VERSION, utc_timestamp()};
  return r;
}

SimReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  Simulation sim(cfg);
  sim.map(options.mapping_in);
  return sim.evaluate(cfg.routing);
}

SweepParam sweep_param_from_string(const std::string& s) {
  if (s == "beta") return SweepParam::Beta;
  if (s == "epe_crossbar_size") return SweepParam::EpeCrossbarSize;
  if (s == "routing_mode") return SweepParam::RoutingMode;
  throw ConfigError("unknown sweep parameter '" + s + "' (expected beta, epe_crossbar_size or routing_mode)");
}

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Beta: return "beta";
    case SweepParam::EpeCrossbarSize: return "epe_crossbar_size";
    case SweepParam::RoutingMode: return "routing_mode";
  }
  return "?";
}

namespace {

std::size_t parse_count(const std::string& value, const std::string& what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size() || value.front() == '-') {
    throw ConfigError(what + ": '" + value + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

ExperimentConfig apply_sweep_value(const ExperimentConfig& cfg, SweepParam param, const std::string& value) {
  ExperimentConfig out = cfg;
  switch (param) {
    case SweepParam::Beta: out.beta = parse_count(value, "beta"); break;
    case SweepParam::EpeCrossbarSize: out.hardware.epe.crossbar_size = parse_count(value, "epe_crossbar_size"); break;
    case SweepParam::RoutingMode:
      try {
        out.routing = routing_mode_from_string(value);
      } catch (const Error& e) {
        throw ConfigError(e.message());
      }
      break;
  }
  out.validate();
  return out;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, SweepParam param, const std::vector<std::string>& values) {
  std::vector<SweepPoint> points;
  if (param == SweepParam::RoutingMode) {
    // one shared mapping so that only the routing mode differs
    Simulation sim(cfg);
    sim.map();
    for (const auto& v : values) {
      SweepPoint p{v, std::nullopt, {}};
      try {
        p.report = sim.evaluate(apply_sweep_value(cfg, param, v).routing);
      } catch (const std::exception& e) {
        p.error = e.what();
      }
      points.push_back(std::move(p));
    }
    return points;
  }
  for (const auto& v : values) {
    SweepPoint p{v, std::nullopt, {}};
    try {
      p.report = run_experiment(apply_sweep_value(cfg, param, v));
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  return points;
}

RoutingComparison compare_routing(const ExperimentConfig& cfg, const RunOptions& options) {
  Simulation sim(cfg);
  sim.map(options.mapping_in);
  RoutingComparison c;
  c.unicast = sim.evaluate(RoutingMode::Unicast);
  c.multicast = sim.evaluate(RoutingMode::Multicast);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < c.multicast.stages.size(); ++s) {
    const double m = c.multicast.stages[s].comm_s;
    if (m > 0.0) {
      sum += (c.unicast.stages[s].comm_s - m) / m;
      ++count;
    }
  }
  c.mean_unicast_penalty = count ? sum / static_cast<double>(count) : 0.0;
  return c;
}

std::vector<TileStatsRow> tile_stats(const std::string& dataset, const Graph& g, const std::vector<std::size_t>& sizes,
                                     std::size_t num_parts, std::uint64_t seed, bool self_loops) {
  std::vector<Graph> pieces;
  if (num_parts > 1) {
    const PartitionSet ps = partition(g, num_parts, derive_seed(seed, "partition"));
    for (const auto& part : ps.parts) pieces.push_back(induced_subgraph(g, part));
  }
  auto stats_at = [&](std::size_t M) {
    if (pieces.empty()) return count_zero_stats(g, M, self_loops);
    ZeroStats total;
    total.M = M;
    for (const auto& p : pieces) {
      const ZeroStats z = count_zero_stats(p, M, self_loops);
      total.nonempty_tiles += z.nonempty_tiles;
      total.stored_zeros += z.stored_zeros;
      total.nnz += z.nnz;
    }
    return total;
  };
  const ZeroStats base = stats_at(8);
  std::vector<TileStatsRow> rows;
  for (std::size_t M : sizes) {
    TileStatsRow row{dataset, M == 8 ? base : stats_at(M), 0.0};
    row.normalized_zeros = base.stored_zeros > 0
                               ? static_cast<double>(row.stats.stored_zeros) / static_cast<double>(base.stored_zeros)
                               : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace regraphx

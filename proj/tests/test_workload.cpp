#include <doctest.h>

#include "oracles.hpp"
#include "regraphx/error.hpp"
#include "regraphx/rng.hpp"
#include "regraphx/workload.hpp"

using namespace regraphx;

namespace {

GnnConfig layers(std::size_t L, std::size_t width = 16) {
  GnnConfig cfg;
  cfg.layer_dims.assign(L + 1, width);
  return cfg;
}

std::vector<std::string> names(const StageGraph& sg) {
  std::vector<std::string> out;
  for (const auto& s : sg.stages) out.push_back(s.name());
  return out;
}

}  // namespace

TEST_CASE("stage graph order") {
  const StageGraph two = build_stage_graph(layers(2));
  CHECK(names(two) == std::vector<std::string>{"V1", "E1", "V2", "E2", "BE2", "BV2", "BE1", "BV1"});
  CHECK(names(build_stage_graph(layers(1))) == std::vector<std::string>{"V1", "E1", "BE1", "BV1"});
  for (std::size_t L = 1; L <= 6; ++L) CHECK(build_stage_graph(layers(L)).size() == 4 * L);

  const StageEdge* v1 = two.out_edge(two.index_of(StageKind::V, Phase::Forward, 1));
  REQUIRE(v1 != nullptr);
  CHECK(v1->edge_class == EdgeClass::Replicate);
  CHECK(v1->consumers == std::vector<std::size_t>{1, 7});
  CHECK(two.out_edge(7) == nullptr);
  CHECK_THROWS_AS(two.index_of(StageKind::V, Phase::Forward, 3), InvalidArgument);
}

TEST_CASE("stage graph edge properties") {
  for (std::size_t L = 1; L <= 5; ++L) {
    const StageGraph sg = build_stage_graph(layers(L));
    for (const auto& s : sg.stages) {
      const StageEdge* e = sg.out_edge(s.id);
      const bool terminal = s.kind == StageKind::V && s.phase == Phase::Backward && s.layer == 1;
      CHECK((e == nullptr) == terminal);
      if (!e) continue;
      CHECK(e->consumers.front() == s.id + 1);
      if (s.kind == StageKind::V && s.phase == Phase::Forward) {
        CHECK(e->edge_class == EdgeClass::Replicate);
        REQUIRE(e->consumers.size() == 2);
        CHECK(sg.stages[e->consumers[1]].name() == "B" + s.name());
      } else {
        CHECK(e->edge_class == EdgeClass::Partition);
        CHECK(e->consumers.size() == 1);
      }
    }
  }
  const std::string dot = to_dot(build_stage_graph(layers(1)));
  CHECK(dot.find("s0 -> s3 [style=bold") != std::string::npos);
  CHECK(dot.find("digraph") == 0);
}

TEST_CASE("config validation") {
  GnnConfig cfg;
  cfg.layer_dims = {16};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.layer_dims = {16, 0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.layer_dims = {16, 8};
  cfg.bv1_multiplier = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("stage work") {
  const TileSpec vpe = TileSpec::vpe_default();
  const TileSpec epe = TileSpec::epe_default();
  GnnConfig cfg;
  cfg.layer_dims = {50, 64};
  const StageGraph sg = build_stage_graph(cfg);
  const Graph batch(100, {{0, 1}, {5, 90}, {40, 41}});
  const TileGrid grid = tile_adjacency(batch, 8, false);

  const StageWork v1 = stage_work(sg.stages[0], batch, cfg, grid, vpe, epe);
  CHECK(v1.macs == 320000);
  CHECK(v1.output_bits == 102400);
  CHECK(v1.logical_ops == 100);
  CHECK(v1.one_copy_crossbars == 8);

  const StageWork bv1 = stage_work(sg.stages[3], batch, cfg, grid, vpe, epe);
  CHECK(bv1.macs == 2 * v1.macs);
  CHECK(bv1.logical_ops == 2 * v1.logical_ops);
  CHECK(bv1.output_bits == 100 * 50 * 16);

  const StageWork e1 = stage_work(sg.stages[1], batch, cfg, grid, vpe, epe);
  CHECK(e1.macs == grid.tiles.size() * 64 * 64);
  CHECK(e1.output_bits == 100 * 64 * 16);
  CHECK(e1.logical_ops == grid.tiles.size() * 64);
  const StageWork be1 = stage_work(sg.stages[2], batch, cfg, grid, vpe, epe);
  CHECK(be1.macs == e1.macs);

  CHECK(stage_work(sg.stages[1], batch, cfg, grid, vpe, epe, 16).one_copy_crossbars == grid.tiles.size() * 8);

  const auto works = stage_works(sg, batch, cfg, grid, vpe, epe);
  CHECK(works[0].consumer_bits.at(1) == v1.output_bits);
  CHECK(works[0].consumer_bits.at(3) == v1.output_bits);
  CHECK(works[3].consumer_bits.empty());

  CHECK_THROWS_AS(stage_work(sg.stages[0], Graph(99, {}), cfg, grid, vpe, epe), InvalidArgument);
  CHECK_THROWS_AS(stage_work(sg.stages[0], batch, cfg, tile_adjacency(batch, 4, false), vpe, epe), InvalidArgument);
}

TEST_CASE("E stage work from the definition: ten tiles") {
  // ten disjoint diagonal blocks of an 80-node graph
  std::vector<Edge> edges;
  for (NodeId b = 0; b < 10; ++b) edges.push_back({b * 8, b * 8 + 1});
  const Graph g(80, edges);
  const TileGrid grid = tile_adjacency(g, 8, false);
  REQUIRE(grid.tiles.size() == 10);
  GnnConfig cfg;
  cfg.layer_dims = {16, 16};
  const StageWork w = stage_work(build_stage_graph(cfg).stages[1], g, cfg, grid, TileSpec::vpe_default(),
                                 TileSpec::epe_default());
  CHECK(w.macs == 10240);
}

TEST_CASE("pipeline makespan examples") {
  const std::vector<StageTiming> uniform(16, {2.0, 1.0});
  CHECK(pipeline_makespan(uniform, 150, 1).makespan == doctest::Approx(165 * 2.0));
  const std::vector<StageTiming> eight(8, {0.5, 0.25});
  CHECK(pipeline_makespan(eight, 1, 1).makespan == doctest::Approx(8 * 0.5));
  CHECK(pipeline_makespan(eight, 1, 0).makespan == 0.0);

  std::vector<StageTiming> t(4, {1.0, 0.0});
  t[2] = {0.5, 3.0};
  const MakespanResult r = pipeline_makespan(t, 10, 2);
  CHECK(r.bottleneck_stage == 2);
  CHECK(r.bound == Bound::Communication);
  CHECK(r.slot_time == 3.0);
  CHECK(r.slots == 26);
  CHECK(r.makespan == doctest::Approx(78.0));
  CHECK_THROWS_AS(pipeline_makespan(t, 0, 1), InvalidArgument);
  t[0].compute = -1.0;
  CHECK_THROWS_AS(pipeline_makespan(t, 1, 1), InvalidArgument);
}

TEST_CASE("pipeline makespan equals the lockstep event oracle") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t S = 4 * (1 + uniform_below(rng, 4));
    const std::size_t N = 1 + uniform_below(rng, 40);
    const std::size_t epochs = 1 + uniform_below(rng, 3);
    std::vector<StageTiming> times(S);
    double T = 0.0;
    for (auto& st : times) {
      // multiples of 1/16 keep sums exact
      st.compute = static_cast<double>(uniform_below(rng, 200)) / 16.0;
      st.comm = static_cast<double>(uniform_below(rng, 200)) / 16.0;
      T = std::max({T, st.compute, st.comm});
    }
    const MakespanResult r = pipeline_makespan(times, N, epochs);
    CHECK(r.makespan == oracle::event_pipeline(std::vector<double>(S, T), N, epochs));

    std::vector<double> own(S);
    for (std::size_t s = 0; s < S; ++s) own[s] = std::max(times[s].compute, times[s].comm);
    CHECK(oracle::event_pipeline(own, N, epochs) <= r.makespan);
  }
}

TEST_CASE("makespan is monotone in stage times and inputs") {
  Rng rng(5);
  std::vector<StageTiming> times(8);
  for (auto& t : times) t = {uniform01(rng), uniform01(rng)};
  const double base = pipeline_makespan(times, 10, 1).makespan;
  for (std::size_t s = 0; s < times.size(); ++s) {
    auto bumped = times;
    bumped[s].compute += 0.5;
    CHECK(pipeline_makespan(bumped, 10, 1).makespan >= base);
    bumped = times;
    bumped[s].comm += 0.5;
    CHECK(pipeline_makespan(bumped, 10, 1).makespan >= base);
  }
  CHECK(pipeline_makespan(times, 11, 1).makespan >= base);
}

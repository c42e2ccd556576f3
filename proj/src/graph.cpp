#include "regraphx/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "regraphx/error.hpp"
#include "regraphx/rng.hpp"

namespace regraphx {

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges, std::size_t feature_dim)
    : num_nodes_(num_nodes), feature_dim_(feature_dim), edges_(std::move(edges)) {
  if (num_nodes_ > std::numeric_limits<NodeId>::max()) {
    throw InvalidArgument("node count " + std::to_string(num_nodes_) + " exceeds NodeId range");
  }
  for (auto& e : edges_) {
    if (e.u >= num_nodes_ || e.v >= num_nodes_) {
      throw InvalidArgument("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                            ") has an endpoint >= num_nodes " + std::to_string(num_nodes_));
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto before = edges_.size();
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  meta_.duplicate_edges_dropped = before - edges_.size();

  std::vector<std::size_t> deg(num_nodes_, 0);
  for (const auto& e : edges_) {
    if (e.u == e.v) {
      ++self_loops_;
      ++deg[e.u];
    } else {
      ++deg[e.u];
      ++deg[e.v];
    }
  }
  offsets_.assign(num_nodes_ + 1, 0);
  for (std::size_t i = 0; i < num_nodes_; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  adj_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adj_[cursor[e.u]++] = e.v;
    if (e.u != e.v) adj_[cursor[e.v]++] = e.u;
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    std::sort(adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
              adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
  }
  node_order_.resize(num_nodes_);
  std::iota(node_order_.begin(), node_order_.end(), NodeId{0});
  meta_.components = count_components(*this);
}

std::span<const NodeId> Graph::neighbors(NodeId u) const {
  if (u >= num_nodes_) throw InvalidArgument("node " + std::to_string(u) + " out of range");
  return {adj_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

void Graph::set_node_order(std::vector<NodeId> order) {
  if (order.size() != num_nodes_) throw InvalidArgument("node_order size mismatch");
  node_order_ = std::move(order);
}

Graph with_self_loops(const Graph& g) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (NodeId i = 0; i < g.num_nodes(); ++i) edges.push_back({i, i});
  Graph out(g.num_nodes(), std::move(edges), g.feature_dim());
  const auto components = out.meta().components;
  out.meta() = g.meta();
  out.meta().components = components;
  out.set_node_order({g.node_order().begin(), g.node_order().end()});
  return out;
}

std::size_t count_components(const Graph& g) {
  std::vector<std::uint8_t> seen(g.num_nodes(), 0);
  std::vector<NodeId> stack;
  std::size_t components = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (seen[s]) continue;
    ++components;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  return components;
}

// ---------------------------------------------------------------------------
// Edge-list files

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_count(std::string_view tok, std::size_t line) {
  if (tok.empty()) throw ParseError(line, "missing integer");
  if (tok.front() == '-') throw ParseError(line, "negative node id '" + std::string(tok) + "'");
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec == std::errc::result_out_of_range) {
    throw ParseError(line, "node id overflow '" + std::string(tok) + "'");
  }
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(tok) + "'");
  }
  return value;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const LoadOptions& options) {
  constexpr std::uint64_t kMaxId = std::numeric_limits<NodeId>::max() - 1;
  std::vector<Edge> edges;
  std::size_t self_loops_dropped = 0;
  std::uint64_t header_nodes = 0;
  bool has_header = false;
  bool any_data = false;
  std::uint64_t max_id = 0;

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!any_data && !has_header && line.starts_with("nodes=")) {
      header_nodes = parse_count(trim(line.substr(6)), line_no);
      if (header_nodes > kMaxId + 1) throw ParseError(line_no, "node count overflow");
      has_header = true;
      continue;
    }
    const auto sep = line.find_first_of(" \t");
    if (sep == std::string_view::npos) throw ParseError(line_no, "expected two node ids");
    const auto a = line.substr(0, sep);
    const auto rest = trim(line.substr(sep));
    const auto sep2 = rest.find_first_of(" \t");
    if (sep2 != std::string_view::npos) throw ParseError(line_no, "expected exactly two node ids");
    const auto u = parse_count(a, line_no);
    const auto v = parse_count(rest, line_no);
    for (auto id : {u, v}) {
      if (id > kMaxId) throw ParseError(line_no, "node id overflow " + std::to_string(id));
      if (has_header && id >= header_nodes) {
        throw ParseError(line_no, "node id overflow " + std::to_string(id) + " >= nodes=" +
                                      std::to_string(header_nodes));
      }
    }
    any_data = true;
    max_id = std::max({max_id, u, v});
    if (u == v) {
      ++self_loops_dropped;
      continue;
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  if (!any_data && !has_header) throw ParseError(line_no, "empty edge list");

  const std::size_t n = has_header ? header_nodes : (any_data ? max_id + 1 : 0);
  if (options.self_loops) {
    for (NodeId i = 0; i < n; ++i) edges.push_back({i, i});
  }
  Graph g(n, std::move(edges), options.feature_dim);
  g.meta().self_loops_dropped = self_loops_dropped;
  return g;
}

Graph load_edge_list(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list '" + path + "'");
  return parse_edge_list(in, options);
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << "nodes=" << g.num_nodes() << '\n';
  if (g.num_self_loops() > 0) out << "# self_loops=" << g.num_self_loops() << '\n';
  for (const auto& e : g.edges()) {
    if (e.u != e.v) out << e.u << ' ' << e.v << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic graphs

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "power_law") return SyntheticKind::PowerLaw;
  if (s == "grid") return SyntheticKind::Grid;
  if (s == "random") return SyntheticKind::Random;
  throw InvalidArgument("unknown synthetic graph kind '" + s + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::PowerLaw: return "power_law";
    case SyntheticKind::Grid: return "grid";
    case SyntheticKind::Random: return "random";
  }
  return "unknown";
}

namespace {

std::vector<Edge> grid_edges(std::size_t n, std::size_t width) {
  if (width == 0) {
    width = 1;
    for (std::size_t w = 1; w * w <= n; ++w) {
      if (n % w == 0) width = w;
    }
  }
  if (n % width != 0) {
    throw InvalidArgument("grid width " + std::to_string(width) + " does not divide " +
                          std::to_string(n) + " nodes");
  }
  const std::size_t rows = n / width;
  std::vector<Edge> edges;
  auto id = [width](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * width + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c + 1 < width) edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
    }
  }
  return edges;
}

// G(n, p) by geometric skipping over the lower triangle.
std::vector<Edge> random_edges(std::size_t n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("edge_prob must lie in [0, 1]");
  std::vector<Edge> edges;
  if (p == 0.0 || n < 2) return edges;
  if (p == 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId w = 0; w < v; ++w) edges.push_back({w, v});
    return edges;
  }
  const double lp = std::log1p(-p);
  std::int64_t v = 1;
  std::int64_t w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    const double r = uniform01(rng);
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / lp));
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v)});
  }
  return edges;
}

// Chung-Lu expected-degree model with power-law weights, sampled in
// O(n + m) by skipping over the descending-weight order.
std::vector<Edge> power_law_edges(std::size_t n, double exponent, double avg_degree, Rng& rng) {
  if (!(exponent > 1.0)) throw InvalidArgument("power-law exponent must be > 1");
  if (!(avg_degree > 0.0)) throw InvalidArgument("avg_degree must be > 0");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(static_cast<double>(i + 1), -1.0 / (exponent - 1.0));
  }
  const double raw_sum = std::accumulate(w.begin(), w.end(), 0.0);
  const double scale = avg_degree * static_cast<double>(n) / raw_sum;
  for (auto& x : w) x *= scale;
  const double total = avg_degree * static_cast<double>(n);

  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), NodeId{0});
  shuffle(label.begin(), label.end(), rng);

  std::vector<Edge> edges;
  for (std::size_t u = 0; u + 1 < n; ++u) {
    std::size_t v = u + 1;
    double p = std::min(w[u] * w[v] / total, 1.0);
    while (v < n && p > 0.0) {
      if (p < 1.0) {
        const double r = uniform01(rng);
        const double skip = std::floor(std::log1p(-r) / std::log1p(-p));
        if (skip >= static_cast<double>(n)) break;
        v += static_cast<std::size_t>(skip);
      }
      if (v >= n) break;
      const double q = std::min(w[u] * w[v] / total, 1.0);
      if (uniform01(rng) < q / p) edges.push_back({label[u], label[v]});
      p = q;
      ++v;
    }
  }
  return edges;
}

}  // namespace

Graph generate_synthetic(SyntheticKind kind, std::size_t num_nodes, const SyntheticParams& params,
                         std::uint64_t seed) {
  if (num_nodes < 1) throw InvalidArgument("synthetic graph needs at least one node");
  Rng rng(seed);
  std::vector<Edge> edges;
  switch (kind) {
    case SyntheticKind::Grid: edges = grid_edges(num_nodes, params.grid_width); break;
    case SyntheticKind::Random: edges = random_edges(num_nodes, params.edge_prob, rng); break;
    case SyntheticKind::PowerLaw:
      edges = power_law_edges(num_nodes, params.exponent, params.avg_degree, rng);
      break;
  }
  return Graph(num_nodes, std::move(edges));
}

// ---------------------------------------------------------------------------
// Partitioning

void validate_partition(const PartitionSet& ps, std::size_t num_nodes) {
  std::vector<std::uint8_t> seen(num_nodes, 0);
  std::size_t covered = 0;
  for (std::size_t p = 0; p < ps.parts.size(); ++p) {
    if (ps.parts[p].empty()) throw InvalidArgument("part " + std::to_string(p) + " is empty");
    for (NodeId u : ps.parts[p]) {
      if (u >= num_nodes) throw InvalidArgument("part node " + std::to_string(u) + " out of range");
      if (seen[u]) throw InvalidArgument("node " + std::to_string(u) + " appears in two parts");
      seen[u] = 1;
      ++covered;
    }
  }
  if (covered != num_nodes) {
    throw InvalidArgument("partition covers " + std::to_string(covered) + " of " +
                          std::to_string(num_nodes) + " nodes");
  }
}

std::size_t edge_cut(const Graph& g, const PartitionSet& ps) {
  std::vector<std::size_t> part_of(g.num_nodes());
  for (std::size_t p = 0; p < ps.parts.size(); ++p)
    for (NodeId u : ps.parts[p]) part_of[u] = p;
  std::size_t cut = 0;
  for (const auto& e : g.edges()) cut += part_of[e.u] != part_of[e.v];
  return cut;
}

PartitionSet GreedyBfsPartitioner::partition(const Graph& g, std::size_t num_parts,
                                             std::uint64_t seed) const {
  const std::size_t n = g.num_nodes();
  if (num_parts < 1 || num_parts > n) {
    throw InvalidArgument("num_parts " + std::to_string(num_parts) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  PartitionSet ps;
  if (num_parts == n) {
    for (NodeId u = 0; u < n; ++u) ps.parts.push_back({u});
    return ps;
  }

  Rng rng(seed);
  std::vector<NodeId> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), NodeId{0});
  shuffle(by_rank.begin(), by_rank.end(), rng);
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[by_rank[r]] = r;

  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> part_of(n, kUnassigned);
  std::vector<std::size_t> free_deg(n);
  std::set<std::pair<std::size_t, std::size_t>> seeds;  // (unassigned degree, rank)
  for (NodeId u = 0; u < n; ++u) {
    std::size_t d = 0;
    for (NodeId v : g.neighbors(u)) d += v != u;
    free_deg[u] = d;
    seeds.insert({d, rank[u]});
  }

  // Frontier of the growing part, ordered by most links into it, then rank.
  std::vector<std::size_t> conn(n, 0);
  std::set<std::tuple<std::int64_t, std::size_t, NodeId>> frontier;
  std::vector<NodeId> touched;

  auto assign = [&](NodeId u, std::size_t p) {
    part_of[u] = p;
    seeds.erase({free_deg[u], rank[u]});
    for (NodeId v : g.neighbors(u)) {
      if (v == u || part_of[v] != kUnassigned) continue;
      seeds.erase({free_deg[v], rank[v]});
      --free_deg[v];
      seeds.insert({free_deg[v], rank[v]});
      if (conn[v] > 0) frontier.erase({-static_cast<std::int64_t>(conn[v]), rank[v], v});
      else touched.push_back(v);
      ++conn[v];
      frontier.insert({-static_cast<std::int64_t>(conn[v]), rank[v], v});
    }
  };

  const std::size_t base = n / num_parts;
  const std::size_t extra = n % num_parts;
  for (std::size_t p = 0; p < num_parts; ++p) {
    const std::size_t target = base + (p < extra ? 1 : 0);
    std::size_t size = 0;
    while (size < target) {
      NodeId u;
      if (!frontier.empty()) {
        u = std::get<2>(*frontier.begin());
        frontier.erase(frontier.begin());
      } else {
        u = by_rank[seeds.begin()->second];
      }
      assign(u, p);
      ++size;
    }
    frontier.clear();
    for (NodeId v : touched) conn[v] = 0;
    touched.clear();
  }

  std::vector<std::size_t> sizes(num_parts, 0);
  for (auto p : part_of) ++sizes[p];

  if (options_.refine && num_parts > 1) {
    const double ideal = static_cast<double>(n) / static_cast<double>(num_parts);
    const auto lo = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor((1.0 - options_.imbalance) * ideal)));
    const auto hi = static_cast<std::size_t>(std::ceil((1.0 + options_.imbalance) * ideal));
    std::vector<std::size_t> count(num_parts, 0);
    std::vector<std::size_t> seen_parts;
    for (std::size_t pass = 0; pass < options_.max_refine_passes; ++pass) {
      std::size_t moves = 0;
      for (NodeId u : by_rank) {
        const std::size_t own = part_of[u];
        for (NodeId v : g.neighbors(u)) {
          if (v == u) continue;
          if (count[part_of[v]]++ == 0) seen_parts.push_back(part_of[v]);
        }
        std::size_t best = own;
        for (auto q : seen_parts) {
          if (q == own) continue;
          if (best == own || count[q] > count[best] || (count[q] == count[best] && q < best)) best = q;
        }
        if (best != own && count[best] > count[own] && sizes[own] > lo && sizes[best] < hi) {
          part_of[u] = best;
          --sizes[own];
          ++sizes[best];
          ++moves;
        }
        for (auto q : seen_parts) count[q] = 0;
        seen_parts.clear();
      }
      if (moves == 0) break;
    }
  }

  ps.parts.assign(num_parts, {});
  for (NodeId u = 0; u < n; ++u) ps.parts[part_of[u]].push_back(u);
  validate_partition(ps, n);
  return ps;
}

PartitionSet partition(const Graph& g, std::size_t num_parts, std::uint64_t seed) {
  return GreedyBfsPartitioner{}.partition(g, num_parts, seed);
}

// ---------------------------------------------------------------------------
// Batching

Graph induced_subgraph(const Graph& g, std::span<const NodeId> node_set) {
  std::vector<NodeId> nodes(node_set.begin(), node_set.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  if (!nodes.empty() && nodes.back() >= g.num_nodes()) {
    throw InvalidArgument("node id " + std::to_string(nodes.back()) + " out of range for " +
                          std::to_string(g.num_nodes()) + "-node graph");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeId u = nodes[i];
    for (NodeId v : g.neighbors(u)) {
      if (v < u) continue;
      const auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
      if (it != nodes.end() && *it == v) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(it - nodes.begin())});
      }
    }
  }
  std::vector<NodeId> order(nodes.size());
  const auto parent_order = g.node_order();
  for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = parent_order[nodes[i]];
  Graph sub(nodes.size(), std::move(edges), g.feature_dim());
  sub.set_node_order(std::move(order));
  return sub;
}

std::vector<Batch> make_batches(const Graph& g, const PartitionSet& ps, std::size_t beta,
                                std::uint64_t seed) {
  if (beta < 1 || beta > ps.num_parts()) {
    throw InvalidArgument("beta " + std::to_string(beta) + " outside [1, " +
                          std::to_string(ps.num_parts()) + "]");
  }
  std::vector<std::size_t> order(ps.num_parts());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> batches;
  batches.reserve(num_inputs(ps.num_parts(), beta));
  for (std::size_t first = 0; first < order.size(); first += beta) {
    Batch b;
    const std::size_t last = std::min(order.size(), first + beta);
    b.member_parts.assign(order.begin() + static_cast<std::ptrdiff_t>(first),
                          order.begin() + static_cast<std::ptrdiff_t>(last));
    std::sort(b.member_parts.begin(), b.member_parts.end());
    for (auto p : b.member_parts) b.node_set.insert(b.node_set.end(), ps.parts[p].begin(), ps.parts[p].end());
    std::sort(b.node_set.begin(), b.node_set.end());
    b.subgraph = induced_subgraph(g, b.node_set);
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace regraphx

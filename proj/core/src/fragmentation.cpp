#include "degroot/fragmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "degroot/error.hpp"
#include "degroot/parallel.hpp"
#include "degroot/random.hpp"
#include "degroot/wisdom.hpp"

namespace degroot {

Graph::Graph(std::size_t n) : n_(n), adj_(n * n, 0) {}

Graph::Graph(std::size_t n, std::vector<std::uint8_t> adjacency) : n_(n), adj_(std::move(adjacency)) {
  if (adj_.size() != n * n) raise(Errc::DimensionMismatch, "adjacency must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    if (adj_[i * n + i]) raise(Errc::InvalidArgument, "graphs carry no self-loops");
    for (std::size_t j = 0; j < n; ++j) {
      adj_[i * n + j] = adj_[i * n + j] ? 1 : 0;
      if ((adj_[i * n + j] != 0) != (adj_[j * n + i] != 0)) raise(Errc::InvalidArgument, "adjacency must be symmetric");
    }
  }
}

Graph Graph::complete(std::size_t n) {
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph Graph::circulant(std::size_t n, const std::vector<std::size_t>& offsets) {
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o : offsets) {
      const std::size_t j = (i + o) % n;
      if (j != i) g.add_edge(i, j);
    }
  return g;
}

void Graph::add_edge(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_) raise(Errc::InvalidArgument, "edge endpoint out of range");
  if (i == j) raise(Errc::InvalidArgument, "graphs carry no self-loops");
  adj_[i * n_ + j] = adj_[j * n_ + i] = 1;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(n_, 0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) d[i] += adj_[i * n_ + j];
  return d;
}

GraphDistribution::GraphDistribution(std::vector<std::pair<Graph, double>> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) raise(Errc::InvalidArgument, "graph distribution needs atoms");
  double total = 0.0;
  const std::size_t n = atoms_.front().first.size();
  for (const auto& [g, p] : atoms_) {
    if (g.size() != n) raise(Errc::DimensionMismatch, "graphs differ in size");
    if (!(p > 0.0 && p <= 1.0)) raise(Errc::InvalidProbability, "graph probabilities must lie in (0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) raise(Errc::InvalidProbability, "graph probabilities must sum to 1");
  std::vector<Graph> sorted;
  for (const auto& a : atoms_) sorted.push_back(a.first);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    raise(Errc::InvalidArgument, "graph atoms must be distinct");
}

GraphDistribution GraphDistribution::merged(std::vector<std::pair<Graph, double>> atoms) {
  std::map<Graph, double> acc;
  for (auto& [g, p] : atoms)
    if (p > 0.0) acc[g] += p;
  std::vector<std::pair<Graph, double>> out(acc.begin(), acc.end());
  return GraphDistribution(std::move(out));
}

Graph accumulation_graph(const std::vector<Graph>& graphs) {
  if (graphs.empty()) raise(Errc::InvalidArgument, "accumulation needs at least one graph");
  const std::size_t n = graphs.front().size();
  std::vector<std::uint8_t> adj(n * n, 0);
  for (const auto& g : graphs) {
    if (g.size() != n) raise(Errc::DimensionMismatch, "graphs differ in size");
    for (std::size_t k = 0; k < n * n; ++k) adj[k] |= g.adjacency()[k];
  }
  return {n, std::move(adj)};
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.size();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> queue{0};
  seen[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::size_t w = 0; w < n; ++w)
      if (g.has_edge(queue[head], w) && !seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
  return queue.size() == n;
}

namespace {

FragmentationReport finish(double best, std::vector<Graph> collection, bool any) {
  FragmentationReport r;
  r.pi_g_empty = !any;
  if (any) {
    r.p_max = std::min(best, 1.0);
    r.argmax_collection = std::move(collection);
    r.predicted_rate = std::abs(std::log(r.p_max));
  }
  return r;
}

}  // namespace

FragmentationReport p_max(const GraphDistribution& dist) {
  const std::size_t n = dist.n();
  if (n > 24) raise(Errc::SizeLimit, "cut enumeration is limited to 24 vertices");
  const auto& atoms = dist.atoms();
  bool any = false;
  for (const auto& [g, p] : atoms) any = any || !is_connected(g);
  if (!any || n < 2) return finish(0.0, {}, false);

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edge_lists;
  for (const auto& a : atoms) edge_lists.push_back(a.first.edges());

  double best = -1.0;
  std::uint64_t best_cut = 0;
  // Vertex 0 always sits outside S, so each bipartition is visited once.
  const std::uint64_t cuts = std::uint64_t{1} << (n - 1);
  for (std::uint64_t half = 1; half < cuts; ++half) {
    const std::uint64_t s = half << 1;
    long double mass = 0.0L;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      bool crosses = false;
      for (auto [u, v] : edge_lists[k])
        if (((s >> u) ^ (s >> v)) & 1U) {
          crosses = true;
          break;
        }
      if (!crosses) mass += atoms[k].second;
    }
    if (static_cast<double>(mass) > best) {
      best = static_cast<double>(mass);
      best_cut = s;
    }
  }
  std::vector<Graph> collection;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    bool crosses = false;
    for (auto [u, v] : edge_lists[k]) crosses = crosses || (((best_cut >> u) ^ (best_cut >> v)) & 1U);
    if (!crosses) collection.push_back(atoms[k].first);
  }
  return finish(best, std::move(collection), true);
}

FragmentationReport p_max_by_collections(const GraphDistribution& dist, bool prune) {
  const auto& atoms = dist.atoms();
  const std::size_t k = atoms.size();
  if (k > 20) raise(Errc::SizeLimit, "collection enumeration is limited to 20 atoms");
  const std::size_t n = dist.n();
  double best = -1.0;
  std::uint32_t best_set = 0;

  // Depth-first over include/exclude decisions; `adj` is the running union.
  std::vector<std::uint8_t> adj(n * n, 0);
  auto visit = [&](auto&& self, std::size_t next, std::uint32_t set, double mass) -> void {
    if (set != 0) {
      const bool connected = is_connected(Graph(n, adj));
      if (connected && prune) return;
      if (!connected && mass > best) {
        best = mass;
        best_set = set;
      }
    }
    for (std::size_t a = next; a < k; ++a) {
      const auto saved = adj;
      for (std::size_t e = 0; e < n * n; ++e) adj[e] |= atoms[a].first.adjacency()[e];
      self(self, a + 1, set | (std::uint32_t{1} << a), mass + atoms[a].second);
      adj = saved;
    }
  };
  visit(visit, 0, 0, 0.0);
  if (best < 0.0) return finish(0.0, {}, false);
  std::vector<Graph> collection;
  for (std::size_t a = 0; a < k; ++a)
    if (best_set >> a & 1U) collection.push_back(atoms[a].first);
  return finish(best, std::move(collection), true);
}

GraphDistribution islands_distribution(std::size_t g, double p_s, double p_d) {
  std::vector<std::pair<Graph, double>> atoms;
  for (const auto& [mask, p] : enumerate_islands(g, p_s, p_d)) atoms.emplace_back(Graph(mask.size(), mask.bits()), p);
  return GraphDistribution::merged(std::move(atoms));
}

GraphDistribution iid_edge_distribution(const Graph& base, double p) {
  if (!(p >= 0.0 && p <= 1.0)) raise(Errc::InvalidProbability, "edge probability must lie in [0, 1]");
  const auto edges = base.edges();
  const std::size_t m = edges.size();
  if (m > 20) raise(Errc::SizeLimit, "iid edge enumeration is limited to 20 edges");
  std::vector<std::pair<Graph, double>> atoms;
  for (std::uint32_t subset = 0; subset < (std::uint32_t{1} << m); ++subset) {
    Graph g(base.size());
    double prob = 1.0;
    for (std::size_t e = 0; e < m; ++e) {
      if (subset >> e & 1U) {
        g.add_edge(edges[e].first, edges[e].second);
        prob *= p;
      } else {
        prob *= 1.0 - p;
      }
    }
    atoms.emplace_back(std::move(g), prob);
  }
  return GraphDistribution::merged(std::move(atoms));
}

Graph graph_of(const StochasticMatrix& m) {
  const std::size_t n = m.size();
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && (m(i, j) > kZeroTol || m(j, i) > kZeroTol)) g.add_edge(i, j);
  return g;
}

GraphDistribution graph_distribution(const GeneratorSpec& spec) {
  if (!spec.is_iid()) raise(Errc::NotIid, "graph law needs an iid generator");
  const SupportDescriptor sup = support(spec);
  if (sup.kind != SupportDescriptor::Kind::Finite)
    raise(Errc::Unsupported, "graph law needs a finite-support generator");
  std::vector<std::pair<Graph, double>> atoms;
  for (std::size_t k = 0; k < sup.atoms.size(); ++k) atoms.emplace_back(graph_of(sup.atoms[k]), sup.probs[k]);
  return GraphDistribution::merged(std::move(atoms));
}

StochasticMatrix metropolis_matrix(const Graph& g) {
  const std::size_t n = g.size();
  const auto d = g.degrees();
  std::vector<double> w(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (g.has_edge(i, j)) {
        w[i * n + j] = 1.0 / (1.0 + static_cast<double>(std::max(d[i], d[j])));
        off += w[i * n + j];
      }
    w[i * n + i] = 1.0 - off;
  }
  return StochasticMatrix::adopt(n, std::move(w));
}

GeneratorSpec two_block_decay_model(std::size_t n, double q) {
  if (n < 2 || n % 2 != 0) raise(Errc::InvalidArgument, "two-block model needs an even n >= 2");
  Graph halves(n);
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((i < h) == (j < h)) halves.add_edge(i, j);
  return mixture({metropolis_matrix(Graph::complete(n)), metropolis_matrix(halves)}, {1.0 - q, q});
}

namespace {

bool symmetric_positive_diagonal(const StochasticMatrix& m) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(m(i, i) > 0.0)) return false;
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12) return false;
  }
  return true;
}

}  // namespace

DecayRateReport decay_rate_estimate(const GeneratorSpec& spec, double epsilon, std::vector<std::size_t> t_grid,
                                    std::size_t replicas, std::uint64_t seed, std::size_t threads) {
  if (!spec.is_iid()) raise(Errc::NotIid, "decay rate needs an iid generator");
  if (!(epsilon > 0.0)) raise(Errc::InvalidArgument, "epsilon must be positive");
  if (t_grid.empty() || replicas == 0) raise(Errc::InvalidArgument, "t_grid and replicas must be nonempty");
  std::sort(t_grid.begin(), t_grid.end());
  t_grid.erase(std::unique(t_grid.begin(), t_grid.end()), t_grid.end());
  if (t_grid.front() == 0) raise(Errc::InvalidArgument, "t_grid entries must be >= 1");
  const std::size_t n = spec.n();
  const std::size_t horizon = t_grid.back();

  // For symmetric stochastic factors ||X_{t+1} (X^(t) - J)|| <= ||X^(t) - J||,
  // so a replica can stop as soon as it drops below epsilon.
  const auto last_exceeding = map_replicas(replicas, threads, [&](std::size_t i) -> std::size_t {
    Generator gen(spec, replica_seed(seed, i));
    std::vector<double> scratch;
    StochasticMatrix product = StochasticMatrix::identity(n);
    std::size_t last = 0;
    for (std::size_t t = 1; t <= horizon; ++t) {
      const StochasticMatrix factor = gen.next();
      if (!symmetric_positive_diagonal(factor))
        raise(Errc::PreconditionUnmet, "decay rate needs symmetric draws with a positive diagonal");
      product.left_multiply_by(factor, scratch);
      double frob = 0.0;
      const double u = 1.0 / static_cast<double>(n);
      for (double e : product.entries()) frob += (e - u) * (e - u);
      if (std::sqrt(frob) < epsilon || distance_to_uniform(product) < epsilon) break;
      last = t;
    }
    return last;
  });

  DecayRateReport report;
  std::vector<double> ts, logs;
  for (std::size_t t : t_grid) {
    DecayPoint pt;
    pt.t = t;
    pt.exceedances = static_cast<std::size_t>(
        std::count_if(last_exceeding.begin(), last_exceeding.end(), [t](std::size_t l) { return l >= t; }));
    pt.probability = static_cast<double>(pt.exceedances) / static_cast<double>(replicas);
    pt.log_probability = pt.exceedances ? std::log(pt.probability) : -std::numeric_limits<double>::infinity();
    if (pt.exceedances >= kMinExceedances) {
      ts.push_back(static_cast<double>(t));
      logs.push_back(pt.log_probability);
    }
    report.per_t_logprob.push_back(pt);
  }
  report.points_used = ts.size();

  const SupportDescriptor sup = support(spec);
  const bool finite = sup.kind == SupportDescriptor::Kind::Finite;
  if (finite && p_max(graph_distribution(spec)).pi_g_empty) {
    report.empirical_rate = std::numeric_limits<double>::infinity();
    return report;
  }
  if (ts.size() >= 2) {
    report.empirical_rate = -ls_slope(ts, logs);
    return report;
  }
  if (!finite && report.per_t_logprob.back().exceedances == 0) {
    report.empirical_rate = std::numeric_limits<double>::infinity();
    return report;
  }
  raise(Errc::InsufficientEvents, "fewer than two grid points with " + std::to_string(kMinExceedances) +
                                      " or more exceedances");
}

}  // namespace degroot

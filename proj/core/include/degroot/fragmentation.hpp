#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "degroot/generators.hpp"
#include "degroot/matrix.hpp"

namespace degroot {

/// Simple undirected graph: symmetric adjacency, empty diagonal.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);
  Graph(std::size_t n, std::vector<std::uint8_t> adjacency);
  static Graph complete(std::size_t n);
  /// Circulant graph on n vertices joining i to i +- o for each offset o.
  static Graph circulant(std::size_t n, const std::vector<std::size_t>& offsets);

  std::size_t size() const noexcept { return n_; }
  bool has_edge(std::size_t i, std::size_t j) const noexcept { return adj_[i * n_ + j] != 0; }
  void add_edge(std::size_t i, std::size_t j);
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  std::vector<std::size_t> degrees() const;
  const std::vector<std::uint8_t>& adjacency() const noexcept { return adj_; }

  friend bool operator==(const Graph&, const Graph&) = default;
  friend auto operator<=>(const Graph& a, const Graph& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    return a.adj_ <=> b.adj_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// Finite law over graphs. Probabilities are positive, sum to one within
/// 1e-12 and atoms are distinct.
class GraphDistribution {
 public:
  GraphDistribution() = default;
  explicit GraphDistribution(std::vector<std::pair<Graph, double>> atoms);
  /// Merges repeated graphs and drops zero-probability entries first.
  static GraphDistribution merged(std::vector<std::pair<Graph, double>> atoms);

  const std::vector<std::pair<Graph, double>>& atoms() const noexcept { return atoms_; }
  std::size_t n() const noexcept { return atoms_.empty() ? 0 : atoms_.front().first.size(); }

  friend bool operator==(const GraphDistribution&, const GraphDistribution&) = default;

 private:
  std::vector<std::pair<Graph, double>> atoms_;
};

struct FragmentationReport {
  double p_max = 0.0;
  std::vector<Graph> argmax_collection;
  bool pi_g_empty = false;
  /// |log p_max|, or +infinity when no disconnected collection exists.
  double predicted_rate = std::numeric_limits<double>::infinity();
};

Graph accumulation_graph(const std::vector<Graph>& graphs);
bool is_connected(const Graph& g);

/// Largest total probability of a collection whose edge union is
/// disconnected. Evaluated over vertex bipartitions: the atoms avoiding a
/// cut form the heaviest collection whose union stays within that cut.
FragmentationReport p_max(const GraphDistribution& dist);

/// Direct search over atom subsets (at most 20 atoms). With `prune`, subsets
/// whose union is already connected are not extended.
FragmentationReport p_max_by_collections(const GraphDistribution& dist, bool prune = true);

GraphDistribution islands_distribution(std::size_t g, double p_s, double p_d);
/// Each edge of `base` present independently with probability p.
GraphDistribution iid_edge_distribution(const Graph& base, double p);

/// Off-diagonal support of a matrix, symmetrised.
Graph graph_of(const StochasticMatrix& m);
/// Graph law induced by a finite-support iid generator.
GraphDistribution graph_distribution(const GeneratorSpec& spec);

/// w_ij = 1 / (1 + max(d_i, d_j)) on edges, remaining mass on the diagonal.
StochasticMatrix metropolis_matrix(const Graph& g);

/// Metropolis weights on the complete graph with probability 1 - q and on two
/// disjoint complete halves with probability q. n must be even.
GeneratorSpec two_block_decay_model(std::size_t n, double q);

struct DecayPoint {
  std::size_t t = 0;
  std::size_t exceedances = 0;
  double probability = 0.0;
  double log_probability = 0.0;
};

struct DecayRateReport {
  double empirical_rate = 0.0;  // +infinity marker when exceedances vanish
  std::vector<DecayPoint> per_t_logprob;
  std::size_t points_used = 0;
};

inline constexpr std::size_t kMinExceedances = 20;

DecayRateReport decay_rate_estimate(const GeneratorSpec& spec, double epsilon, std::vector<std::size_t> t_grid,
                                    std::size_t replicas, std::uint64_t seed, std::size_t threads = 0);

}  // namespace degroot

#include <algorithm>
#include <limits>

#include "degroot/engine.hpp"
#include "degroot/error.hpp"
#include "degroot/parallel.hpp"
#include "degroot/random.hpp"

namespace degroot {

DisagreementReport disagreement_degree(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                                       double atom_tol, std::uint64_t seed, std::size_t threads,
                                       std::size_t max_atoms) {
  if (replicas < 100) raise(Errc::InvalidArgument, "disagreement_degree needs at least 100 replicas");
  struct Limit {
    StochasticMatrix product;
    std::size_t rank = 0;
  };
  const auto limits = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    Limit out;
    out.product = accumulate(gen, t_max, -1.0).product;
    out.rank = numeric_rank(out.product).numeric_rank;
    return out;
  });

  DisagreementReport report;
  const double weight = 1.0 / static_cast<double>(replicas);
  std::vector<StochasticMatrix> atoms;
  std::vector<std::size_t> counts;
  bool clustered = true;
  for (const auto& l : limits) {
    report.rank_histogram[l.rank] += weight;
    if (!clustered) continue;
    std::size_t best = atoms.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double d = max_abs_difference(atoms[k], l.product);
      if (d <= atom_tol && d < best_dist) {
        best = k;
        best_dist = d;
      }
    }
    if (best == atoms.size()) {
      if (atoms.size() == max_atoms) {
        clustered = false;
        continue;
      }
      atoms.push_back(l.product);
      counts.push_back(0);
    }
    ++counts[best];
  }
  double mode_freq = -1.0;
  for (const auto& [rank, freq] : report.rank_histogram)
    if (freq > mode_freq) {
      mode_freq = freq;
      report.eta_estimate = rank;
    }
  if (clustered)
    for (std::size_t k = 0; k < atoms.size(); ++k)
      report.support_atoms.emplace_back(atoms[k], static_cast<double>(counts[k]) * weight);
  return report;
}

}  // namespace degroot

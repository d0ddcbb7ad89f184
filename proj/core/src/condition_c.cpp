#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "degroot/engine.hpp"
#include "degroot/error.hpp"
#include "degroot/parallel.hpp"
#include "degroot/random.hpp"

namespace degroot {

namespace {

constexpr std::size_t kMaskClosureCap = 200000;

struct ClosureOutcome {
  enum class Kind { Positive, Stable, Open } kind = Kind::Open;
  std::size_t length = 0;
  std::size_t reached = 0;
};

// Boolean skeletons of all left products of length <= horizon.
ClosureOutcome mask_closure(const std::vector<SkeletonMask>& masks, std::size_t horizon) {
  ClosureOutcome out;
  std::set<SkeletonMask> reached(masks.begin(), masks.end());
  for (const auto& m : masks)
    if (m.is_all_true()) return {ClosureOutcome::Kind::Positive, 1, reached.size()};
  std::vector<SkeletonMask> frontier(reached.begin(), reached.end());
  for (std::size_t len = 2; len <= horizon; ++len) {
    std::vector<SkeletonMask> fresh;
    for (const auto& m : masks) {
      for (const auto& r : frontier) {
        SkeletonMask p = boolean_product(m, r);
        if (p.is_all_true()) return {ClosureOutcome::Kind::Positive, len, reached.size() + 1};
        if (reached.insert(p).second) fresh.push_back(std::move(p));
      }
    }
    if (fresh.empty()) return {ClosureOutcome::Kind::Stable, len - 1, reached.size()};
    if (reached.size() > kMaskClosureCap) break;
    frontier = std::move(fresh);
  }
  out.reached = reached.size();
  out.length = horizon;
  return out;
}

std::vector<SkeletonMask> distinct_masks(const SupportDescriptor& s) {
  std::vector<SkeletonMask> masks = s.masks;
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  return masks;
}

}  // namespace

ConditionCReport check_condition_c(const GeneratorSpec& spec, std::size_t horizon, std::size_t replicas,
                                   std::uint64_t seed, std::size_t threads) {
  if (horizon == 0) raise(Errc::InvalidArgument, "horizon must be >= 1");
  ConditionCReport report;
  report.horizon = horizon;
  const SupportDescriptor sup = support(spec);

  if (sup.kind == SupportDescriptor::Kind::Continuous && sup.strictly_positive_prob > 0.0) {
    report.verdict = Verdict::Holds;
    report.method = CheckMethod::SupportAnalytic;
    report.evidence = sup.strictly_positive_prob;
    return report;
  }

  // Skeletons of independent draws compose by boolean products; temporal
  // dependence can rule some sequences out, so only iid closures decide.
  if (spec.is_iid() && !sup.masks.empty()) {
    const ClosureOutcome closure = mask_closure(distinct_masks(sup), horizon);
    if (closure.kind != ClosureOutcome::Kind::Open) {
      report.method = CheckMethod::SkeletonSemigroup;
      report.verdict = closure.kind == ClosureOutcome::Kind::Positive ? Verdict::Holds : Verdict::Fails;
      report.evidence = static_cast<double>(closure.length);
      return report;
    }
  }

  if (replicas == 0) return report;
  const auto hits = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    std::vector<double> scratch;
    StochasticMatrix product = StochasticMatrix::identity(spec.n());
    for (std::size_t t = 0; t < horizon; ++t) {
      product.left_multiply_by(gen.next(), scratch);
      if (is_strictly_positive(product)) return 1;
    }
    return 0;
  });
  const double hit_fraction =
      static_cast<double>(std::accumulate(hits.begin(), hits.end(), 0)) / static_cast<double>(replicas);
  if (hit_fraction > 0.0) {
    report.verdict = Verdict::Holds;
    report.method = CheckMethod::MonteCarloPositivity;
    report.evidence = hit_fraction;
    return report;
  }

  const auto paths = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    std::vector<double> scratch, coeffs;
    coeffs.reserve(horizon);
    StochasticMatrix product = StochasticMatrix::identity(spec.n());
    for (std::size_t t = 0; t < horizon; ++t) {
      product.left_multiply_by(gen.next(), scratch);
      coeffs.push_back(dobrushin_coefficient(product));
    }
    return coeffs;
  });
  double best = 2.0;
  const double r = static_cast<double>(replicas);
  for (std::size_t t = 0; t < horizon; ++t) {
    double mean = 0.0, sq = 0.0;
    for (const auto& p : paths) mean += p[t];
    mean /= r;
    for (const auto& p : paths) sq += (p[t] - mean) * (p[t] - mean);
    const double se = replicas > 1 ? std::sqrt(sq / (r - 1.0) / r) : 0.0;
    best = std::min(best, mean + 3.0 * se);
  }
  if (best < 1.0) {
    report.verdict = Verdict::Holds;
    report.method = CheckMethod::ContractionIntegral;
    report.evidence = best;
    return report;
  }
  report.verdict = Verdict::Undetermined;
  report.method = CheckMethod::MonteCarloPositivity;
  report.evidence = 0.0;
  return report;
}

SemigroupReport semigroup_explore(const std::vector<StochasticMatrix>& support, std::size_t max_len, double dedup_tol,
                                  std::size_t cap) {
  if (support.empty()) raise(Errc::InvalidArgument, "semigroup support is empty");
  const std::size_t n = support.front().size();
  for (const auto& s : support)
    if (s.size() != n) raise(Errc::DimensionMismatch, "support matrices differ in size");

  std::vector<StochasticMatrix> elements;
  auto seen = [&](const StochasticMatrix& m) {
    return std::any_of(elements.begin(), elements.end(),
                       [&](const StochasticMatrix& e) { return max_abs_difference(e, m) <= dedup_tol; });
  };
  std::vector<StochasticMatrix> frontier;
  for (const auto& s : support)
    if (!seen(s)) {
      elements.push_back(s);
      frontier.push_back(s);
    }

  SemigroupReport report;
  report.depth = 1;
  while (report.depth < max_len) {
    std::vector<StochasticMatrix> fresh;
    for (const auto& s : support) {
      for (const auto& f : frontier) {
        StochasticMatrix p = multiply(s, f);
        if (seen(p)) continue;
        elements.push_back(p);
        fresh.push_back(std::move(p));
        if (elements.size() > cap)
          raise(Errc::ExplosionGuard, "semigroup exceeded " + std::to_string(cap) + " distinct elements");
      }
    }
    if (fresh.empty()) {
      report.closed = true;
      break;
    }
    frontier = std::move(fresh);
    ++report.depth;
  }

  report.elements = elements.size();
  report.min_rank = n;
  std::set<SkeletonMask> masks;
  for (const auto& e : elements) {
    masks.insert(skeleton(e));
    const std::size_t rank = numeric_rank(e).numeric_rank;
    report.min_rank = std::min(report.min_rank, rank);
    if (rank == 1) report.rank_one_atoms.push_back(e);
  }
  report.skeletons.assign(masks.begin(), masks.end());
  return report;
}

CyclicityReport cyclicity_check(const std::vector<StochasticMatrix>& support) {
  if (support.empty()) raise(Errc::InvalidArgument, "cyclicity support is empty");
  const std::size_t n = support.front().size();
  std::vector<std::vector<std::size_t>> out_edges(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& s : support) {
        if (s.size() != n) raise(Errc::DimensionMismatch, "support matrices differ in size");
        if (s(i, j) > kZeroTol) {
          out_edges[i].push_back(j);
          break;
        }
      }

  // A cyclic family starting at v must contain everything reachable from v,
  // with the class of u fixed by path length mod m. That is consistent
  // exactly when m divides d(a) + 1 - d(b) on every reachable edge.
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> dist(n, kUnseen);
    std::vector<std::size_t> queue{v};
    dist[v] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t a = queue[head];
      for (std::size_t b : out_edges[a])
        if (dist[b] == kUnseen) {
          dist[b] = dist[a] + 1;
          queue.push_back(b);
        }
    }
    std::size_t period = 0;
    for (std::size_t a : queue)
      for (std::size_t b : out_edges[a]) {
        const auto diff = static_cast<long long>(dist[a]) + 1 - static_cast<long long>(dist[b]);
        period = std::gcd(period, static_cast<std::size_t>(diff < 0 ? -diff : diff));
      }
    if (period >= 2) {
      CyclicityReport report;
      report.cyclic = true;
      report.witness_partition.assign(period, {});
      for (std::size_t u : queue) report.witness_partition[dist[u] % period].push_back(u);
      for (auto& block : report.witness_partition) std::sort(block.begin(), block.end());
      return report;
    }
  }
  return {};
}

bool is_cyclic_partition(const std::vector<StochasticMatrix>& support,
                         const std::vector<std::vector<std::size_t>>& partition) {
  const std::size_t m = partition.size();
  if (m < 2 || support.empty()) return false;
  const std::size_t n = support.front().size();
  std::vector<int> owner(n, -1);
  for (std::size_t s = 0; s < m; ++s) {
    if (partition[s].empty()) return false;
    for (std::size_t i : partition[s]) {
      if (i >= n || owner[i] != -1) return false;
      owner[i] = static_cast<int>(s);
    }
  }
  for (const auto& sigma : support)
    for (std::size_t s = 0; s < m; ++s) {
      const auto& next = partition[(s + 1) % m];
      for (std::size_t i : partition[s]) {
        double mass = 0.0;
        for (std::size_t l : next) mass += sigma(i, l);
        if (std::abs(mass - 1.0) > 1e-9) return false;
      }
    }
  return true;
}

SkeletonEquivalence skeleton_equivalence_test(const GeneratorSpec& a, const GeneratorSpec& b, std::size_t horizon,
                                              std::size_t replicas, std::uint64_t seed, std::size_t threads) {
  if (!a.is_iid() || !b.is_iid()) raise(Errc::NotIid, "skeleton equivalence needs iid generators");
  if (a.n() != b.n()) raise(Errc::DimensionMismatch, "generators differ in size");
  SkeletonEquivalence out;
  out.same_initial_skeleton = distinct_masks(support(a)) == distinct_masks(support(b));
  out.verdict_a = check_condition_c(a, horizon, replicas, seed, threads);
  out.verdict_b = check_condition_c(b, horizon, replicas, seed, threads);
  out.agree = out.verdict_a.verdict == out.verdict_b.verdict;
  return out;
}

}  // namespace degroot

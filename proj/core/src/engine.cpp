#include "degroot/engine.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "degroot/error.hpp"
#include "degroot/parallel.hpp"
#include "degroot/random.hpp"

namespace degroot {

BeliefState BeliefState::from_signals(std::vector<double> p0, std::optional<double> gamma) {
  for (double v : p0)
    if (!(v >= 0.0 && v <= 1.0)) raise(Errc::InvalidArgument, "initial beliefs must lie in [0, 1]");
  BeliefState s;
  s.p = p0;
  s.p0 = std::move(p0);
  s.gamma = gamma;
  return s;
}

std::vector<double> matvec(const StochasticMatrix& m, const std::vector<double>& p) {
  const std::size_t n = m.size();
  if (p.size() != n) raise(Errc::DimensionMismatch, "belief vector length differs from matrix size");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * p[j];
    out[i] = acc;
  }
  return out;
}

BeliefState evolve(Generator& gen, BeliefState beliefs, std::size_t steps) {
  if (beliefs.p.size() != gen.spec().n()) raise(Errc::DimensionMismatch, "belief vector length differs from n");
  for (std::size_t s = 0; s < steps; ++s) {
    beliefs.p = matvec(gen.next(), beliefs.p);
    ++beliefs.t;
  }
  return beliefs;
}

ProductAccumulator accumulate(Generator& gen, std::size_t t_max, double gap_tol, bool stop_on_consensus,
                              bool track_contraction) {
  const std::size_t n = gen.spec().n();
  ProductAccumulator acc;
  acc.product = StochasticMatrix::identity(n);
  acc.consensus_gap = distance_to_rank_one(acc.product);
  if (acc.consensus_gap <= gap_tol) acc.consensus_time = 0;
  std::vector<double> scratch;
  while (acc.t < t_max) {
    const StochasticMatrix factor = gen.next();
    acc.product.left_multiply_by(factor, scratch);
    ++acc.t;
    if (track_contraction && acc.contraction_bound > 0.0) acc.contraction_bound *= dobrushin_coefficient(factor);
    acc.consensus_gap = distance_to_rank_one(acc.product);
    if (!acc.strict_positive_seen) acc.strict_positive_seen = is_strictly_positive(acc.product);
    if (acc.consensus_gap <= gap_tol) {
      if (!acc.consensus_time) acc.consensus_time = acc.t;
      if (stop_on_consensus) break;
    }
  }
  return acc;
}

void summarize(InfluenceEstimate& est) {
  est.mean.clear();
  est.variance.clear();
  est.max_component_mean = est.max_component_variance = 0.0;
  if (est.samples.empty()) return;
  const std::size_t n = est.samples.front().size();
  const double k = static_cast<double>(est.samples.size());
  est.mean.assign(n, 0.0);
  est.variance.assign(n, 0.0);
  std::vector<double> maxima;
  maxima.reserve(est.samples.size());
  for (const auto& s : est.samples) {
    for (std::size_t i = 0; i < n; ++i) est.mean[i] += s[i];
    maxima.push_back(*std::max_element(s.begin(), s.end()));
  }
  for (auto& m : est.mean) m /= k;
  for (const auto& s : est.samples)
    for (std::size_t i = 0; i < n; ++i) est.variance[i] += (s[i] - est.mean[i]) * (s[i] - est.mean[i]);
  const double dof = std::max(1.0, k - 1.0);
  for (auto& v : est.variance) v /= dof;
  est.max_component_mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / k;
  for (double m : maxima) est.max_component_variance += (m - est.max_component_mean) * (m - est.max_component_mean);
  est.max_component_variance /= dof;
}

InfluenceEstimate estimate_influence(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                                     double gap_tol, std::uint64_t seed, std::size_t threads) {
  if (replicas == 0) raise(Errc::InvalidArgument, "replicas must be >= 1");
  struct Outcome {
    std::vector<double> row;
    double gap = 1.0;
    bool converged = false;
  };
  auto outcomes = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    const ProductAccumulator acc = accumulate(gen, t_max, gap_tol, true);
    Outcome out;
    out.gap = acc.consensus_gap;
    out.converged = acc.consensus_gap <= gap_tol;
    if (out.converged) {
      const auto r = acc.product.row(0);
      out.row.assign(r.begin(), r.end());
    }
    return out;
  });
  InfluenceEstimate est;
  est.replicas = replicas;
  for (auto& o : outcomes) {
    est.per_replica_gap.push_back(o.gap);
    if (o.converged) {
      est.samples.push_back(std::move(o.row));
    } else {
      ++est.failures;
    }
  }
  if (2 * est.samples.size() < replicas) {
    raise(Errc::NoConvergence, std::to_string(est.samples.size()) + " of " + std::to_string(replicas) +
                                   " replicas reached the consensus tolerance");
  }
  summarize(est);
  return est;
}

ConsensusTimes consensus_times(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max, double gap_tol,
                               std::uint64_t seed, std::size_t threads) {
  ConsensusTimes out;
  out.samples = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    return accumulate(gen, t_max, gap_tol, true).consensus_time;
  });
  double total = 0.0;
  std::size_t hits = 0;
  for (const auto& s : out.samples)
    if (s) {
      total += static_cast<double>(*s);
      ++hits;
    }
  out.mean_converged = hits ? total / static_cast<double>(hits) : std::numeric_limits<double>::quiet_NaN();
  out.converged_fraction = replicas ? static_cast<double>(hits) / static_cast<double>(replicas) : 0.0;
  return out;
}

namespace {

// Spectral norm of (I - 11'/n) m, the spread of m around its column means.
double consensus_deviation(const StochasticMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  a.rowwise() -= a.colwise().mean();
  if (a.norm() == 0.0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

double lyapunov_exponent(const GeneratorSpec& spec, std::size_t t_max, std::size_t replicas, std::uint64_t seed,
                         std::size_t threads) {
  if (t_max == 0 || replicas == 0) raise(Errc::InvalidArgument, "t_max and replicas must be >= 1");
  const auto logs = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    const ProductAccumulator acc = accumulate(gen, t_max, -1.0);
    const double dev = consensus_deviation(acc.product);
    return dev > 0.0 ? std::log(dev) / static_cast<double>(t_max) : -std::numeric_limits<double>::infinity();
  });
  double total = 0.0;
  for (double l : logs) {
    if (std::isinf(l)) return 0.0;
    total += l;
  }
  return std::exp(total / static_cast<double>(replicas));
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::string_view to_string(CheckMethod m) noexcept {
  switch (m) {
    case CheckMethod::SupportAnalytic: return "support_analytic";
    case CheckMethod::SkeletonSemigroup: return "skeleton_semigroup";
    case CheckMethod::MonteCarloPositivity: return "monte_carlo_positivity";
    case CheckMethod::ContractionIntegral: return "contraction_integral";
  }
  return "support_analytic";
}

}  // namespace degroot

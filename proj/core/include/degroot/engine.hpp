#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "degroot/generators.hpp"
#include "degroot/matrix.hpp"

namespace degroot {

inline constexpr double kGapTol = 1e-8;

struct BeliefState {
  std::vector<double> p0;
  std::vector<double> p;
  std::size_t t = 0;
  std::optional<double> gamma;

  static BeliefState from_signals(std::vector<double> p0, std::optional<double> gamma = std::nullopt);
};

/// Applies p <- X_t p for `steps` draws of `gen`.
BeliefState evolve(Generator& gen, BeliefState beliefs, std::size_t steps);

/// p -> m p.
std::vector<double> matvec(const StochasticMatrix& m, const std::vector<double>& p);

struct ProductAccumulator {
  StochasticMatrix product;
  std::size_t t = 0;
  double consensus_gap = 1.0;
  std::optional<std::size_t> consensus_time;
  bool strict_positive_seen = false;
  /// Running product of the factors' Dobrushin coefficients; stays 1 unless
  /// tracking was requested.
  double contraction_bound = 1.0;
};

/// Left product X_t ... X_1 for t up to t_max. With `stop_on_consensus` the
/// loop ends at the first t whose gap is <= gap_tol.
ProductAccumulator accumulate(Generator& gen, std::size_t t_max, double gap_tol = kGapTol,
                              bool stop_on_consensus = false, bool track_contraction = false);

struct InfluenceEstimate {
  std::vector<std::vector<double>> samples;
  std::vector<double> per_replica_gap;
  std::vector<double> mean;
  std::vector<double> variance;
  double max_component_mean = 0.0;
  double max_component_variance = 0.0;
  std::size_t replicas = 0;
  std::size_t failures = 0;

  double convergence_fraction() const noexcept {
    return replicas == 0 ? 0.0 : static_cast<double>(replicas - failures) / static_cast<double>(replicas);
  }
};

/// Mean, variance and E[max_i pi_i] of a sample set of unit vectors.
void summarize(InfluenceEstimate& est);

/// Throws NoConvergence when fewer than half the replicas reach gap_tol.
InfluenceEstimate estimate_influence(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                                     double gap_tol, std::uint64_t seed, std::size_t threads = 0);

struct ConsensusTimes {
  std::vector<std::optional<std::size_t>> samples;
  double mean_converged = 0.0;
  double converged_fraction = 0.0;
};

ConsensusTimes consensus_times(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max, double gap_tol,
                               std::uint64_t seed, std::size_t threads = 0);

enum class Verdict { Holds, Fails, Undetermined };
enum class CheckMethod { SupportAnalytic, SkeletonSemigroup, MonteCarloPositivity, ContractionIntegral };

struct ConditionCReport {
  Verdict verdict = Verdict::Undetermined;
  CheckMethod method = CheckMethod::SupportAnalytic;
  double evidence = 0.0;
  std::size_t horizon = 0;
  friend bool operator==(const ConditionCReport&, const ConditionCReport&) = default;
};

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(CheckMethod m) noexcept;

ConditionCReport check_condition_c(const GeneratorSpec& spec, std::size_t horizon, std::size_t replicas,
                                   std::uint64_t seed, std::size_t threads = 0);

struct SemigroupReport {
  std::vector<SkeletonMask> skeletons;
  std::size_t min_rank = 0;
  std::vector<StochasticMatrix> rank_one_atoms;
  std::size_t elements = 0;
  std::size_t depth = 0;  // longest product length explored
  bool closed = false;     // no new element appeared before max_len
};

SemigroupReport semigroup_explore(const std::vector<StochasticMatrix>& support, std::size_t max_len,
                                  double dedup_tol = 1e-9, std::size_t cap = 50000);

struct ConvergenceTimeReport {
  double mean_t_phi = 0.0;
  std::vector<std::size_t> samples;
  std::size_t cap_hits = 0;
};

/// Default t_cap: 50 * ceil(-log phi).
std::size_t default_t_cap(double phi);

ConvergenceTimeReport convergence_time_2x2(const GeneratorSpec& spec, double phi, std::size_t replicas,
                                           std::size_t t_cap, std::uint64_t seed, std::size_t threads = 0);

/// Law of (x, y) = ((X)_{11}, (X)_{21}) for a 2 x 2 generator.
struct ProductBeta {
  double a1 = 1.0, b1 = 1.0;  // x ~ Beta(a1, b1)
  double a2 = 1.0, b2 = 1.0;  // y ~ Beta(a2, b2), independent of x
};
struct AtomLaw {
  std::vector<std::pair<double, double>> points;
  std::vector<double> probs;
};
using Law2x2 = std::variant<ProductBeta, AtomLaw>;

Law2x2 law_2x2(const GeneratorSpec& spec);

/// E[-log |x - y|] under the law.
double log_energy(const Law2x2& law, std::size_t quad_points = 256);

double lyapunov_exponent(const GeneratorSpec& spec, std::size_t t_max, std::size_t replicas, std::uint64_t seed,
                         std::size_t threads = 0);

struct DisagreementReport {
  std::size_t eta_estimate = 0;
  std::map<std::size_t, double> rank_histogram;
  /// Empty when the limits do not cluster on a handful of matrices.
  std::vector<std::pair<StochasticMatrix, double>> support_atoms;
};

DisagreementReport disagreement_degree(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                                       double atom_tol, std::uint64_t seed, std::size_t threads = 0,
                                       std::size_t max_atoms = 64);

struct CyclicityReport {
  bool cyclic = false;
  std::vector<std::vector<std::size_t>> witness_partition;
};

CyclicityReport cyclicity_check(const std::vector<StochasticMatrix>& support);

/// Whether every sigma in support sends each A_s entirely into A_{s+1}.
bool is_cyclic_partition(const std::vector<StochasticMatrix>& support,
                         const std::vector<std::vector<std::size_t>>& partition);

struct SkeletonEquivalence {
  bool same_initial_skeleton = false;
  ConditionCReport verdict_a;
  ConditionCReport verdict_b;
  bool agree = false;
};

SkeletonEquivalence skeleton_equivalence_test(const GeneratorSpec& a, const GeneratorSpec& b, std::size_t horizon,
                                              std::size_t replicas, std::uint64_t seed, std::size_t threads = 0);

}  // namespace degroot

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "degroot/engine.hpp"
#include "degroot/error.hpp"
#include "degroot/generators.hpp"

namespace degroot {

/// Uniform(gamma - width, gamma + width); the interval must fit in [0, 1].
struct UniformSignal {
  double width = 0.25;
  friend bool operator==(const UniformSignal&, const UniformSignal&) = default;
};
struct BernoulliSignal {
  friend bool operator==(const BernoulliSignal&, const BernoulliSignal&) = default;
};
/// Finite law on [0, 1]; its mean must equal gamma.
struct CustomSignal {
  std::vector<double> values;
  std::vector<double> probs;
  friend bool operator==(const CustomSignal&, const CustomSignal&) = default;
};
using SignalLaw = std::variant<UniformSignal, BernoulliSignal, CustomSignal>;

/// Throws InvalidArgument unless the law has mean gamma and positive variance.
void validate_signal(const SignalLaw& law, double gamma);
double signal_variance(const SignalLaw& law, double gamma);
double draw_signal(Rng& rng, const SignalLaw& law, double gamma);

/// Named size-indexed families of generators.
///   average_or_identity  param = zeta
///   ring_uniform_self
///   ring_fixed           the cyclic shift, never reaching consensus
///   leader_follower
///   perturbed_uniform    param = epsilon around 11'/n
///   star                 Dirichlet rows with phi = (n, 1, ..., 1)
struct Family {
  std::string name = "ring_uniform_self";
  double param = 0.0;
  friend bool operator==(const Family&, const Family&) = default;
};

GeneratorSpec make_family(const Family& family, std::size_t n);

struct WisdomConfig {
  Family family;
  std::vector<std::size_t> sizes{5, 10, 20, 40};
  double gamma = 0.5;
  SignalLaw signal = UniformSignal{};
  std::size_t replicas = 1000;
  std::size_t t_max = 100000;
  double gap_tol = kGapTol;
  std::uint64_t seed = 1;
  friend bool operator==(const WisdomConfig&, const WisdomConfig&) = default;
};

struct SizeResult {
  std::size_t n = 0;
  double mean_abs_error = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double e_max_pi = 0.0;
  double var_max_pi = 0.0;
  double convergence_fraction = 0.0;
  /// Set when fewer than half the replicas reached consensus.
  std::optional<Errc> status;
};

struct WisdomResult {
  std::vector<SizeResult> per_size;
};

WisdomResult run_wisdom(const WisdomConfig& config, std::size_t threads = 0);

struct RateFit {
  double k_fit = 0.0;
  double m_fit = 0.0;
  bool qualifies = false;
};

/// Slopes below this are read as flat at desk-scale sizes.
inline constexpr double kDecayingRatioSlope = 0.1;

/// Throws BalanceViolation when a parameter matrix is not balanced.
RateFit check_mic3_rates(const std::function<std::vector<double>(std::size_t)>& alpha_family,
                         const std::vector<std::size_t>& sizes);

/// alpha_ij = phi_i phi_j / sum(phi): symmetric, hence balanced with row sums phi.
std::vector<double> product_alphas(const std::vector<double>& phi);
std::vector<double> ring_alphas(std::size_t n);
std::vector<double> star_alphas(std::size_t n);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConjugacyReport {
  std::vector<double> phi;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> expected_mean;
  std::vector<double> expected_variance;
  double mean_err = 0.0;  // max_i |mean_i - expected_i|
  double var_err = 0.0;   // max_i |var_i - expected_i|
  bool pass = false;
};

/// phi taken from the Dirichlet parameters of `spec` (balance enforced).
ConjugacyReport dirichlet_conjugacy_test(const GeneratorSpec& spec, std::size_t replicas, std::uint64_t seed,
                                         std::size_t t_max = 100000, double gap_tol = kGapTol,
                                         std::size_t threads = 0);
/// Same comparison against an explicitly supplied phi.
ConjugacyReport dirichlet_conjugacy_test(const GeneratorSpec& spec, const std::vector<double>& phi,
                                         std::size_t replicas, std::uint64_t seed, std::size_t t_max = 100000,
                                         double gap_tol = kGapTol, std::size_t threads = 0);

double consensus_probability(std::size_t k, double phi_n);

struct MeanRankOne {
  StochasticMatrix mean_limit;
  std::size_t rank = 0;
  double tol_used = 0.0;
  double strict_positive_fraction = 0.0;
};

/// The rank threshold is relative and widened to 5 / sqrt(replicas) to
/// absorb Monte Carlo noise in the averaged matrix. Throws PreconditionUnmet
/// when no replica produced a strictly positive product, unless
/// `allow_no_positive` is set.
MeanRankOne mean_rank_one_test(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                               std::uint64_t seed, bool allow_no_positive = false, std::size_t threads = 0);

}  // namespace degroot

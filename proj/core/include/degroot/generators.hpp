#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "degroot/matrix.hpp"
#include "degroot/random.hpp"

namespace degroot {

class GeneratorSpec;

/// Unit mass on a single interaction matrix (a static network).
struct Fixed {
  StochasticMatrix matrix;
  friend bool operator==(const Fixed&, const Fixed&) = default;
};

/// Finitely many atoms drawn with `probs`, either iid or, when `transition`
/// is non-empty, as a stationary Markov chain over atom indices started
/// from `probs`.
struct FiniteMixture {
  std::vector<StochasticMatrix> atoms;
  std::vector<double> probs;
  std::vector<std::vector<double>> transition;
  friend bool operator==(const FiniteMixture&, const FiniteMixture&) = default;
};

/// Independent rows, row i ~ Dirichlet(alpha[i][.]). Zero alphas are
/// structural zeros; a row with a single positive alpha is deterministic.
struct DirichletRows {
  std::size_t n = 0;
  std::vector<double> alpha;  // row-major n x n
  friend bool operator==(const DirichletRows&, const DirichletRows&) = default;
};

/// Dirichlet perturbation of a strictly positive T: row i ~ Dir(eps * s_i * T_i.).
struct PerturbedFixed {
  StochasticMatrix base;
  std::vector<double> influence;
  double epsilon = 1.0;
  friend bool operator==(const PerturbedFixed&, const PerturbedFixed&) = default;
};

/// Opinion-leader network driven by one shared uniform draw per period.
struct LeaderFollower {
  std::size_t n = 2;
  friend bool operator==(const LeaderFollower&, const LeaderFollower&) = default;
};

/// Two agents who meet with probability p_meet and then put weight epsilon
/// on each other.
struct Encounter2x2 {
  double epsilon = 0.5;
  double p_meet = 0.5;
  friend bool operator==(const Encounter2x2&, const Encounter2x2&) = default;
};

/// (a, 1-a; b, 1-b) with a ~ p_a delta_x + (1-p_a) delta_0, b likewise with p_b.
struct Bernoulli2x2 {
  double x = 0.5;
  double p_a = 0.5;
  double p_b = 0.5;
  friend bool operator==(const Bernoulli2x2&, const Bernoulli2x2&) = default;
};

/// Identity with probability a, the swap permutation otherwise.
struct TwoPointSwap {
  double a = 0.5;
  friend bool operator==(const TwoPointSwap&, const TwoPointSwap&) = default;
};

/// Two islands of g agents. Each draw lays a uniform random spanning tree
/// on every island whose g-1 links are present independently with
/// probability p_s, plus one candidate cross link between uniform endpoints
/// present with probability p_d.
struct Islands {
  std::size_t g = 2;
  double p_s = 1.0;
  double p_d = 0.0;
  friend bool operator==(const Islands&, const Islands&) = default;
};

/// Random undirected graphs sharing one degree sequence; agents average
/// uniformly over their neighbours (self-loops count as neighbours).
struct UndirectedDegree {
  std::vector<SkeletonMask> graphs;
  std::vector<double> probs;
  friend bool operator==(const UndirectedDegree&, const UndirectedDegree&) = default;
};

/// X_t = (1 - xi) X_{t-1} + xi Xi_t with X_0 = start and Xi_t drawn from source.
struct Ar1Mixture {
  double xi = 0.5;
  StochasticMatrix start;
  std::shared_ptr<const GeneratorSpec> source;
  friend bool operator==(const Ar1Mixture& a, const Ar1Mixture& b);
};

using Model = std::variant<Fixed, FiniteMixture, DirichletRows, PerturbedFixed, LeaderFollower,
                           Encounter2x2, Bernoulli2x2, TwoPointSwap, Islands, UndirectedDegree,
                           Ar1Mixture>;

/// Declarative description of a network generating process. Construction
/// validates the model's invariants; instances are immutable.
class GeneratorSpec {
 public:
  explicit GeneratorSpec(Model model);

  std::size_t n() const noexcept { return n_; }
  const Model& model() const noexcept { return model_; }
  std::string_view kind() const noexcept;
  /// True when successive draws are independent.
  bool is_iid() const noexcept;

  template <typename T>
  const T* as() const noexcept {
    return std::get_if<T>(&model_);
  }

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;

 private:
  Model model_;
  std::size_t n_ = 0;
};

// Factories for the named processes.
GeneratorSpec fixed(StochasticMatrix t);
GeneratorSpec mixture(std::vector<StochasticMatrix> atoms, std::vector<double> probs);
GeneratorSpec markov_mixture(std::vector<StochasticMatrix> atoms, std::vector<double> probs,
                             std::vector<std::vector<double>> transition);
GeneratorSpec dirichlet_rows(std::size_t n, std::vector<double> alpha);
GeneratorSpec ring_uniform_self(std::size_t n);
GeneratorSpec leader_follower(std::size_t n);
GeneratorSpec perturbed_fixed(const StochasticMatrix& t, double epsilon);
GeneratorSpec encounter_2x2(double epsilon, double p_meet);
/// Encounters as a two-state Markov chain: meet -> meet with probability
/// `stay_met`, apart -> meet with probability `start_meet`.
GeneratorSpec correlated_encounter_2x2(double epsilon, double start_meet, double stay_met);
GeneratorSpec bernoulli_2x2(double x, double p_a, double p_b);
GeneratorSpec two_point_swap(double a);
GeneratorSpec islands_graphs(std::size_t g, double p_s, double p_d);
GeneratorSpec undirected_degree(std::vector<SkeletonMask> graphs, std::vector<double> probs);
GeneratorSpec ar1_mixture(double xi, StochasticMatrix start, GeneratorSpec source);
/// Both agents draw their self-weight from Beta(alpha, alpha) independently.
GeneratorSpec beta_weights_2x2(double alpha);
/// Rows (w, 1-w) with w ~ Beta(a, b) drawn independently for both agents.
GeneratorSpec independent_weights_2x2(double a, double b);
/// 11'/n with probability zeta, identity otherwise.
GeneratorSpec average_or_identity(std::size_t n, double zeta);
/// (x, 1-x; 0, 1) with x ~ Uniform(0, 1).
GeneratorSpec random_upper_2x2();

/// Three agents: 1 and 2 follow agent 3, who splits weight (kappa, 1 - kappa)
/// between them.
StochasticMatrix follow_third(double kappa);
/// Agents 1 and 2 both hold (kappa, 1 - kappa, 0); agent 3 keeps its own belief.
StochasticMatrix merged_pair(double kappa);
/// Agents 1 and 2 swap beliefs, agent 3 is stubborn.
StochasticMatrix swap_pair_stubborn_third();
/// follow_third(kappa) with probability r, swap_pair_stubborn_third otherwise.
GeneratorSpec stubborn_third_mixture(double kappa, double r);

/// Swap permutation on two agents.
StochasticMatrix swap_2x2();
/// Averaging over neighbours; isolated agents keep their own belief.
StochasticMatrix degree_normalized(const SkeletonMask& adjacency);
bool homophily(const Islands& islands) noexcept;

/// Sampler state: a spec plus a deterministic pseudorandom stream.
class Generator {
 public:
  Generator(GeneratorSpec spec, std::uint64_t seed);
  Generator(const Generator&) = delete;
  Generator& operator=(const Generator&) = delete;
  Generator(Generator&&) noexcept;
  Generator& operator=(Generator&&) noexcept;
  ~Generator();

  /// Draws X_t and advances the state.
  StochasticMatrix next();

  const GeneratorSpec& spec() const noexcept { return spec_; }
  std::size_t steps() const noexcept { return steps_; }

 private:
  GeneratorSpec spec_;
  Rng rng_;
  std::size_t steps_ = 0;
  std::size_t markov_state_ = 0;
  StochasticMatrix last_;
  std::unique_ptr<Generator> source_;
};

inline StochasticMatrix sample_next(Generator& state) { return state.next(); }

/// Exact expectation of one draw. Ar1Mixture reports its long-run mean
/// (the source mean when xi > 0).
StochasticMatrix mean_matrix(const GeneratorSpec& spec);

struct SupportDescriptor {
  enum class Kind { Finite, Continuous };
  Kind kind = Kind::Finite;
  std::vector<StochasticMatrix> atoms;  // Finite only, each listed once
  std::vector<double> probs;            // Finite only
  /// Skeletons occurring with positive probability; for Finite supports the
  /// i-th mask belongs to the i-th atom.
  std::vector<SkeletonMask> masks;
  double strictly_positive_prob = 0.0;
};

SupportDescriptor support(const GeneratorSpec& spec);

/// Row sums of a row-major n x n parameter matrix.
std::vector<double> alpha_row_sums(std::size_t n, const std::vector<double>& alpha);
/// Whether row sums equal column sums componentwise within tol.
bool is_balanced(std::size_t n, const std::vector<double>& alpha, double tol = 1e-9);
/// Dirichlet parameters of a spec's rows, if it has them (DirichletRows or
/// PerturbedFixed).
std::vector<double> dirichlet_parameters(const GeneratorSpec& spec);

/// Exact distribution of the islands adjacency (duplicates merged). Only
/// tractable for small islands; throws SizeLimit for g > 4.
std::vector<std::pair<SkeletonMask, double>> enumerate_islands(std::size_t g, double p_s, double p_d);

/// Gamma-normalised Dirichlet draw; entries with alpha == 0 stay zero.
void sample_dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out);

}  // namespace degroot

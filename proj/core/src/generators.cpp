#include "degroot/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "degroot/error.hpp"

namespace degroot {

namespace {

constexpr double kProbTol = 1e-12;

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << name << " = " << p << " is not in [0, 1]";
    raise(Errc::InvalidProbability, os.str());
  }
}

void check_prob_vector(const std::vector<double>& probs, std::size_t expected, const char* what) {
  if (probs.size() != expected) raise(Errc::DimensionMismatch, std::string(what) + ": probability count mismatch");
  double total = 0.0;
  for (double p : probs) {
    check_probability(p, what);
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": probabilities sum to " << total;
    raise(Errc::InvalidProbability, os.str());
  }
}

std::size_t check_atoms(const std::vector<StochasticMatrix>& atoms) {
  if (atoms.empty()) raise(Errc::InvalidArgument, "mixture needs at least one atom");
  const std::size_t n = atoms.front().size();
  for (const auto& a : atoms)
    if (a.size() != n) raise(Errc::DimensionMismatch, "mixture atoms differ in dimension");
  return n;
}

bool is_symmetric(const SkeletonMask& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g(i, j) != g(j, i)) return false;
  return true;
}

bool mask_connected(const SkeletonMask& g) {
  const std::size_t n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w = 0; w < n; ++w)
      if (g(v, w) && !seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
  }
  return reached == n;
}

std::vector<std::size_t> degrees(const SkeletonMask& g) {
  std::vector<std::size_t> d(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) d[i] += g(i, j) ? 1 : 0;
  return d;
}

struct Validator {
  std::size_t operator()(const Fixed& m) const { return m.matrix.size(); }

  std::size_t operator()(const FiniteMixture& m) const {
    const std::size_t n = check_atoms(m.atoms);
    check_prob_vector(m.probs, m.atoms.size(), "mixture");
    if (!m.transition.empty()) {
      const std::size_t k = m.atoms.size();
      if (m.transition.size() != k) raise(Errc::DimensionMismatch, "transition must be k x k");
      for (const auto& row : m.transition) check_prob_vector(row, k, "transition row");
      for (std::size_t j = 0; j < k; ++j) {
        double flow = 0.0;
        for (std::size_t i = 0; i < k; ++i) flow += m.probs[i] * m.transition[i][j];
        if (std::abs(flow - m.probs[j]) > 1e-9)
          raise(Errc::InvalidProbability, "mixture probabilities are not stationary for the transition");
      }
    }
    return n;
  }

  std::size_t operator()(const DirichletRows& m) const {
    if (m.n == 0 || m.alpha.size() != m.n * m.n) raise(Errc::DimensionMismatch, "alpha must be n x n");
    for (std::size_t i = 0; i < m.n; ++i) {
      bool any = false;
      for (std::size_t j = 0; j < m.n; ++j) {
        const double a = m.alpha[i * m.n + j];
        if (!(a >= 0.0) || !std::isfinite(a)) raise(Errc::InvalidArgument, "alpha entries must be finite and >= 0");
        any = any || a > 0.0;
      }
      if (!any) raise(Errc::InvalidArgument, "every alpha row needs a positive entry");
    }
    return m.n;
  }

  std::size_t operator()(const PerturbedFixed& m) const {
    if (!is_strictly_positive(m.base)) raise(Errc::NotStrictlyPositive, "perturbed base matrix must be strictly positive");
    if (!(m.epsilon > 0.0)) raise(Errc::InvalidArgument, "epsilon must be positive");
    if (m.influence.size() != m.base.size()) raise(Errc::DimensionMismatch, "influence vector length");
    return m.base.size();
  }

  std::size_t operator()(const LeaderFollower& m) const {
    if (m.n < 2) raise(Errc::InvalidArgument, "leader-follower needs n >= 2");
    return m.n;
  }

  std::size_t operator()(const Encounter2x2& m) const {
    if (!(m.epsilon > 0.0 && m.epsilon < 1.0)) raise(Errc::InvalidArgument, "encounter epsilon must lie in (0, 1)");
    check_probability(m.p_meet, "p_meet");
    return 2;
  }

  std::size_t operator()(const Bernoulli2x2& m) const {
    if (!(m.x > 0.0 && m.x <= 1.0)) raise(Errc::InvalidArgument, "x must lie in (0, 1]");
    check_probability(m.p_a, "p_a");
    check_probability(m.p_b, "p_b");
    return 2;
  }

  std::size_t operator()(const TwoPointSwap& m) const {
    if (!(m.a > 0.0 && m.a < 1.0)) raise(Errc::InvalidProbability, "swap mass a must lie in (0, 1)");
    return 2;
  }

  std::size_t operator()(const Islands& m) const {
    if (m.g < 2) raise(Errc::InvalidArgument, "islands need g >= 2");
    check_probability(m.p_s, "p_s");
    check_probability(m.p_d, "p_d");
    return 2 * m.g;
  }

  std::size_t operator()(const UndirectedDegree& m) const {
    if (m.graphs.empty()) raise(Errc::InvalidArgument, "undirected model needs graphs");
    check_prob_vector(m.probs, m.graphs.size(), "undirected");
    const std::size_t n = m.graphs.front().size();
    const auto d0 = degrees(m.graphs.front());
    for (const auto& g : m.graphs) {
      if (g.size() != n) raise(Errc::DimensionMismatch, "graphs differ in size");
      if (!is_symmetric(g)) raise(Errc::InvalidArgument, "adjacency must be symmetric");
      if (!mask_connected(g)) raise(Errc::InvalidArgument, "adjacency must be connected");
      if (degrees(g) != d0) raise(Errc::InvalidArgument, "graphs must share one degree sequence");
    }
    return n;
  }

  std::size_t operator()(const Ar1Mixture& m) const {
    if (!(m.xi >= 0.0 && m.xi <= 1.0)) raise(Errc::InvalidArgument, "xi must lie in [0, 1]");
    if (!m.source) raise(Errc::InvalidArgument, "ar1 mixture needs a source");
    if (m.source->n() != m.start.size()) raise(Errc::DimensionMismatch, "ar1 start and source differ in size");
    return m.start.size();
  }
};

// Uniform labelled spanning tree on `g` vertices from a random Pruefer code.
std::vector<std::pair<std::size_t, std::size_t>> decode_pruefer(const std::vector<std::size_t>& code, std::size_t g) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (g == 2) return {{0, 1}};
  std::vector<std::size_t> degree(g, 1);
  for (std::size_t v : code) ++degree[v];
  for (std::size_t v : code) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
    --degree[leaf];
    --degree[v];
  }
  std::size_t u = g, w = g;
  for (std::size_t v = 0; v < g; ++v)
    if (degree[v] == 1) (u == g ? u : w) = v;
  edges.emplace_back(u, w);
  return edges;
}

double log_gamma_draw(Rng& rng, double shape) {
  // Boosted draw for small shapes: G(a) = G(a + 1) * U^(1/a), kept in logs.
  if (shape < 1.0) {
    std::gamma_distribution<double> boosted(shape + 1.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    while (u == 0.0) u = unif(rng);
    return std::log(boosted(rng)) + std::log(u) / shape;
  }
  std::gamma_distribution<double> gamma(shape, 1.0);
  return std::log(gamma(rng));
}

std::vector<double> perturbed_alpha(const PerturbedFixed& m) {
  const std::size_t n = m.base.size();
  std::vector<double> alpha(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) alpha[i * n + j] = m.epsilon * m.influence[i] * m.base(i, j);
  return alpha;
}

StochasticMatrix sample_dirichlet_rows(Rng& rng, std::size_t n, const std::vector<double>& alpha) {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    sample_dirichlet(rng, std::span<const double>(alpha.data() + i * n, n), std::span<double>(out.data() + i * n, n));
  return StochasticMatrix::adopt(n, std::move(out));
}

std::size_t draw_index(Rng& rng, const std::vector<double>& probs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  // u landed in the round-off tail; return the last atom with mass.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return k;
  return 0;
}

StochasticMatrix encounter_matrix(double eps) {
  return make_stochastic({{1.0 - eps, eps}, {eps, 1.0 - eps}});
}

StochasticMatrix two_by_two(double a, double b) { return make_stochastic({{a, 1.0 - a}, {b, 1.0 - b}}); }

SkeletonMask sample_islands(Rng& rng, const Islands& m) {
  const std::size_t g = m.g;
  const std::size_t n = 2 * g;
  std::vector<std::uint8_t> bits(n * n, 0);
  std::uniform_int_distribution<std::size_t> vertex(0, g - 1);
  std::bernoulli_distribution within(m.p_s);
  for (std::size_t island = 0; island < 2; ++island) {
    std::vector<std::size_t> code(g >= 2 ? g - 2 : 0);
    for (auto& c : code) c = vertex(rng);
    for (auto [u, v] : decode_pruefer(code, g)) {
      if (!within(rng)) continue;
      const std::size_t a = island * g + u, b = island * g + v;
      bits[a * n + b] = bits[b * n + a] = 1;
    }
  }
  if (std::bernoulli_distribution(m.p_d)(rng)) {
    const std::size_t a = vertex(rng), b = g + vertex(rng);
    bits[a * n + b] = bits[b * n + a] = 1;
  }
  return {n, std::move(bits)};
}

}  // namespace

bool operator==(const Ar1Mixture& a, const Ar1Mixture& b) {
  if (a.xi != b.xi || !(a.start == b.start)) return false;
  if (!a.source || !b.source) return a.source == b.source;
  return *a.source == *b.source;
}

GeneratorSpec::GeneratorSpec(Model model) : model_(std::move(model)) { n_ = std::visit(Validator{}, model_); }

std::string_view GeneratorSpec::kind() const noexcept {
  static constexpr std::string_view names[] = {"fixed",        "mixture",   "dirichlet_rows", "perturbed_fixed",
                                               "leader_follower", "encounter_2x2", "bernoulli_2x2", "two_point_swap",
                                               "islands",      "undirected_degree", "ar1_mixture"};
  return names[model_.index()];
}

bool GeneratorSpec::is_iid() const noexcept {
  if (const auto* m = as<FiniteMixture>()) return m->transition.empty();
  if (const auto* m = as<Ar1Mixture>()) return m->xi == 0.0 || (m->xi == 1.0 && m->source->is_iid());
  return true;
}

GeneratorSpec fixed(StochasticMatrix t) { return GeneratorSpec(Fixed{std::move(t)}); }

GeneratorSpec mixture(std::vector<StochasticMatrix> atoms, std::vector<double> probs) {
  return GeneratorSpec(FiniteMixture{std::move(atoms), std::move(probs), {}});
}

GeneratorSpec markov_mixture(std::vector<StochasticMatrix> atoms, std::vector<double> probs,
                             std::vector<std::vector<double>> transition) {
  if (transition.empty()) raise(Errc::InvalidArgument, "markov mixture needs a transition matrix");
  return GeneratorSpec(FiniteMixture{std::move(atoms), std::move(probs), std::move(transition)});
}

GeneratorSpec dirichlet_rows(std::size_t n, std::vector<double> alpha) {
  return GeneratorSpec(DirichletRows{n, std::move(alpha)});
}

GeneratorSpec ring_uniform_self(std::size_t n) {
  if (n < 2) raise(Errc::InvalidArgument, "ring needs n >= 2");
  std::vector<double> alpha(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    alpha[i * n + i] = 1.0;
    alpha[i * n + (i + 1) % n] += 1.0;
  }
  // n == 2 collapses both entries onto the same row pair; keep Beta(1, 1).
  if (n == 2) alpha = {1.0, 1.0, 1.0, 1.0};
  return dirichlet_rows(n, std::move(alpha));
}

GeneratorSpec leader_follower(std::size_t n) { return GeneratorSpec(LeaderFollower{n}); }

GeneratorSpec perturbed_fixed(const StochasticMatrix& t, double epsilon) {
  if (!is_strictly_positive(t)) raise(Errc::NotStrictlyPositive, "perturbed_fixed requires a strictly positive T");
  return GeneratorSpec(PerturbedFixed{t, stationary_distribution(t), epsilon});
}

GeneratorSpec encounter_2x2(double epsilon, double p_meet) { return GeneratorSpec(Encounter2x2{epsilon, p_meet}); }

GeneratorSpec correlated_encounter_2x2(double epsilon, double start_meet, double stay_met) {
  check_probability(start_meet, "start_meet");
  check_probability(stay_met, "stay_met");
  // Stationary meeting frequency of the two-state chain.
  const double denom = start_meet + (1.0 - stay_met);
  const double pi_meet = denom > 0.0 ? start_meet / denom : 1.0;
  return markov_mixture({StochasticMatrix::identity(2), encounter_matrix(epsilon)}, {1.0 - pi_meet, pi_meet},
                        {{1.0 - start_meet, start_meet}, {1.0 - stay_met, stay_met}});
}

GeneratorSpec bernoulli_2x2(double x, double p_a, double p_b) { return GeneratorSpec(Bernoulli2x2{x, p_a, p_b}); }

GeneratorSpec two_point_swap(double a) { return GeneratorSpec(TwoPointSwap{a}); }

GeneratorSpec islands_graphs(std::size_t g, double p_s, double p_d) { return GeneratorSpec(Islands{g, p_s, p_d}); }

GeneratorSpec undirected_degree(std::vector<SkeletonMask> graphs, std::vector<double> probs) {
  return GeneratorSpec(UndirectedDegree{std::move(graphs), std::move(probs)});
}

GeneratorSpec ar1_mixture(double xi, StochasticMatrix start, GeneratorSpec source) {
  return GeneratorSpec(Ar1Mixture{xi, std::move(start), std::make_shared<const GeneratorSpec>(std::move(source))});
}

GeneratorSpec beta_weights_2x2(double alpha) {
  if (!(alpha > 0.0)) raise(Errc::InvalidArgument, "beta concentration must be positive");
  return dirichlet_rows(2, {alpha, alpha, alpha, alpha});
}

GeneratorSpec independent_weights_2x2(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) raise(Errc::InvalidArgument, "beta shapes must be positive");
  return dirichlet_rows(2, {a, b, a, b});
}

GeneratorSpec average_or_identity(std::size_t n, double zeta) {
  check_probability(zeta, "zeta");
  return mixture({StochasticMatrix::uniform(n), StochasticMatrix::identity(n)}, {zeta, 1.0 - zeta});
}

GeneratorSpec random_upper_2x2() { return dirichlet_rows(2, {1.0, 1.0, 0.0, 1.0}); }

StochasticMatrix follow_third(double kappa) {
  check_probability(kappa, "kappa");
  return make_stochastic({{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}, {kappa, 1.0 - kappa, 0.0}});
}

StochasticMatrix merged_pair(double kappa) {
  check_probability(kappa, "kappa");
  return make_stochastic({{kappa, 1.0 - kappa, 0.0}, {kappa, 1.0 - kappa, 0.0}, {0.0, 0.0, 1.0}});
}

StochasticMatrix swap_pair_stubborn_third() {
  return make_stochastic({{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}});
}

GeneratorSpec stubborn_third_mixture(double kappa, double r) {
  check_probability(r, "r");
  return mixture({follow_third(kappa), swap_pair_stubborn_third()}, {r, 1.0 - r});
}

StochasticMatrix swap_2x2() { return StochasticMatrix::cyclic_shift(2); }

StochasticMatrix degree_normalized(const SkeletonMask& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t d = 0;
    for (std::size_t j = 0; j < n; ++j) d += adjacency(i, j) ? 1 : 0;
    if (d == 0) {
      out[i * n + i] = 1.0;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (adjacency(i, j)) out[i * n + j] = 1.0 / static_cast<double>(d);
  }
  return StochasticMatrix::adopt(n, std::move(out));
}

bool homophily(const Islands& islands) noexcept { return islands.p_s > islands.p_d; }

void sample_dirichlet(Rng& rng, std::span<const double> alpha, std::span<double> out) {
  const std::size_t n = alpha.size();
  std::size_t positive = 0, last = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (alpha[j] > 0.0) {
      ++positive;
      last = j;
    }
  std::fill(out.begin(), out.end(), 0.0);
  if (positive == 1) {
    out[last] = 1.0;
    return;
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] > 0.0) {
      out[j] = log_gamma_draw(rng, alpha[j]);
      peak = std::max(peak, out[j]);
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] > 0.0) {
      out[j] = std::exp(out[j] - peak);
      total += out[j];
    }
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= total;
}

Generator::Generator(GeneratorSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) {
  if (const auto* m = spec_.as<Ar1Mixture>()) {
    last_ = m->start;
    source_ = std::make_unique<Generator>(*m->source, splitmix64(seed));
  }
}

Generator::Generator(Generator&&) noexcept = default;
Generator& Generator::operator=(Generator&&) noexcept = default;
Generator::~Generator() = default;

StochasticMatrix Generator::next() {
  ++steps_;
  const std::size_t n = spec_.n();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  struct Sampler {
    Generator& self;
    std::size_t n;
    std::uniform_real_distribution<double>& unif;

    StochasticMatrix operator()(const Fixed& m) const { return m.matrix; }

    StochasticMatrix operator()(const FiniteMixture& m) const {
      if (m.transition.empty() || self.steps_ == 1) {
        self.markov_state_ = draw_index(self.rng_, m.probs);
      } else {
        self.markov_state_ = draw_index(self.rng_, m.transition[self.markov_state_]);
      }
      return m.atoms[self.markov_state_];
    }

    StochasticMatrix operator()(const DirichletRows& m) const { return sample_dirichlet_rows(self.rng_, n, m.alpha); }

    StochasticMatrix operator()(const PerturbedFixed& m) const {
      return sample_dirichlet_rows(self.rng_, n, perturbed_alpha(m));
    }

    StochasticMatrix operator()(const LeaderFollower&) const {
      const double x = unif(self.rng_);
      std::vector<double> out(n * n, 0.0);
      out[0] = x;
      out[1] += 1.0 - x;
      for (std::size_t i = 1; i < n; ++i) {
        if (x >= 0.5) {
          out[i * n + i] = 1.0;
        } else {
          out[i * n + (i + 1) % n] = 1.0;
        }
      }
      return StochasticMatrix::adopt(n, std::move(out));
    }

    StochasticMatrix operator()(const Encounter2x2& m) const {
      return unif(self.rng_) < m.p_meet ? encounter_matrix(m.epsilon) : StochasticMatrix::identity(2);
    }

    StochasticMatrix operator()(const Bernoulli2x2& m) const {
      const double a = unif(self.rng_) < m.p_a ? m.x : 0.0;
      const double b = unif(self.rng_) < m.p_b ? m.x : 0.0;
      return two_by_two(a, b);
    }

    StochasticMatrix operator()(const TwoPointSwap& m) const {
      return unif(self.rng_) < m.a ? StochasticMatrix::identity(2) : swap_2x2();
    }

    StochasticMatrix operator()(const Islands& m) const { return degree_normalized(sample_islands(self.rng_, m)); }

    StochasticMatrix operator()(const UndirectedDegree& m) const {
      return degree_normalized(m.graphs[draw_index(self.rng_, m.probs)]);
    }

    StochasticMatrix operator()(const Ar1Mixture& m) const {
      if (m.xi == 0.0) return self.last_;
      const StochasticMatrix fresh = self.source_->next();
      if (m.xi == 1.0) {
        self.last_ = fresh;
        return fresh;
      }
      std::vector<double> out(n * n);
      for (std::size_t k = 0; k < n * n; ++k)
        out[k] = (1.0 - m.xi) * self.last_.entries()[k] + m.xi * fresh.entries()[k];
      self.last_ = StochasticMatrix::adopt(n, std::move(out));
      return self.last_;
    }
  };
  return std::visit(Sampler{*this, n, unif}, spec_.model());
}

std::vector<std::pair<SkeletonMask, double>> enumerate_islands(std::size_t g, double p_s, double p_d) {
  if (g < 2) raise(Errc::InvalidArgument, "islands need g >= 2");
  if (g > 4) raise(Errc::SizeLimit, "islands enumeration is limited to g <= 4");
  check_probability(p_s, "p_s");
  check_probability(p_d, "p_d");
  // Distribution of one island's edge set, keyed by its g x g adjacency bits.
  std::map<std::vector<std::uint8_t>, double> island;
  const std::size_t code_len = g - 2;
  std::size_t trees = 1;
  for (std::size_t k = 0; k < code_len; ++k) trees *= g;
  const double tree_prob = 1.0 / static_cast<double>(trees);
  std::vector<std::size_t> code(code_len, 0);
  for (std::size_t t = 0; t < trees; ++t) {
    std::size_t rest = t;
    for (auto& c : code) {
      c = rest % g;
      rest /= g;
    }
    const auto edges = decode_pruefer(code, g);
    const std::size_t m = edges.size();
    for (std::size_t subset = 0; subset < (std::size_t{1} << m); ++subset) {
      std::vector<std::uint8_t> bits(g * g, 0);
      double p = tree_prob;
      for (std::size_t e = 0; e < m; ++e) {
        if (subset >> e & 1U) {
          bits[edges[e].first * g + edges[e].second] = bits[edges[e].second * g + edges[e].first] = 1;
          p *= p_s;
        } else {
          p *= 1.0 - p_s;
        }
      }
      if (p > 0.0) island[bits] += p;
    }
  }
  const std::size_t n = 2 * g;
  std::vector<std::pair<std::vector<std::uint8_t>, double>> cross;  // extra edge bits, probability
  if (p_d < 1.0) cross.push_back({{}, 1.0 - p_d});
  if (p_d > 0.0)
    for (std::size_t a = 0; a < g; ++a)
      for (std::size_t b = 0; b < g; ++b) cross.push_back({{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(g + b)},
                                                           p_d / static_cast<double>(g * g)});
  std::map<std::vector<std::uint8_t>, double> merged;
  for (const auto& [left, pl] : island)
    for (const auto& [right, pr] : island)
      for (const auto& [link, pc] : cross) {
        std::vector<std::uint8_t> bits(n * n, 0);
        for (std::size_t i = 0; i < g; ++i)
          for (std::size_t j = 0; j < g; ++j) {
            bits[i * n + j] = left[i * g + j];
            bits[(g + i) * n + (g + j)] = right[i * g + j];
          }
        if (!link.empty()) bits[link[0] * n + link[1]] = bits[link[1] * n + link[0]] = 1;
        merged[bits] += pl * pr * pc;
      }
  std::vector<std::pair<SkeletonMask, double>> out;
  out.reserve(merged.size());
  double total = 0.0;
  for (const auto& [bits, p] : merged) total += p;
  for (auto& [bits, p] : merged) out.emplace_back(SkeletonMask(n, bits), p / total);
  return out;
}

StochasticMatrix mean_matrix(const GeneratorSpec& spec) {
  const std::size_t n = spec.n();
  struct Mean {
    std::size_t n;

    StochasticMatrix weighted(const std::vector<StochasticMatrix>& atoms, const std::vector<double>& probs) const {
      std::vector<double> acc(n * n, 0.0);
      for (std::size_t k = 0; k < atoms.size(); ++k)
        for (std::size_t e = 0; e < n * n; ++e) acc[e] += probs[k] * atoms[k].entries()[e];
      return StochasticMatrix::adopt(n, std::move(acc));
    }

    StochasticMatrix operator()(const Fixed& m) const { return m.matrix; }
    StochasticMatrix operator()(const FiniteMixture& m) const { return weighted(m.atoms, m.probs); }
    StochasticMatrix operator()(const DirichletRows& m) const { return StochasticMatrix::adopt(n, m.alpha); }
    StochasticMatrix operator()(const PerturbedFixed& m) const { return m.base; }
    StochasticMatrix operator()(const LeaderFollower&) const {
      std::vector<double> out(n * n, 0.0);
      out[0] = 0.5;
      out[1] += 0.5;
      for (std::size_t i = 1; i < n; ++i) {
        out[i * n + i] += 0.5;
        out[i * n + (i + 1) % n] += 0.5;
      }
      return StochasticMatrix::adopt(n, std::move(out));
    }
    StochasticMatrix operator()(const Encounter2x2& m) const {
      return weighted({StochasticMatrix::identity(2), encounter_matrix(m.epsilon)}, {1.0 - m.p_meet, m.p_meet});
    }
    StochasticMatrix operator()(const Bernoulli2x2& m) const { return two_by_two(m.p_a * m.x, m.p_b * m.x); }
    StochasticMatrix operator()(const TwoPointSwap& m) const { return two_by_two(m.a, 1.0 - m.a); }
    StochasticMatrix operator()(const Islands& m) const {
      std::vector<StochasticMatrix> atoms;
      std::vector<double> probs;
      for (const auto& [adj, p] : enumerate_islands(m.g, m.p_s, m.p_d)) {
        atoms.push_back(degree_normalized(adj));
        probs.push_back(p);
      }
      return weighted(atoms, probs);
    }
    StochasticMatrix operator()(const UndirectedDegree& m) const {
      std::vector<StochasticMatrix> atoms;
      for (const auto& g : m.graphs) atoms.push_back(degree_normalized(g));
      return weighted(atoms, m.probs);
    }
    StochasticMatrix operator()(const Ar1Mixture& m) const {
      return m.xi == 0.0 ? m.start : mean_matrix(*m.source);
    }
  };
  return std::visit(Mean{n}, spec.model());
}

namespace {

SupportDescriptor finite_support(std::vector<StochasticMatrix> atoms, std::vector<double> probs) {
  SupportDescriptor out;
  out.kind = SupportDescriptor::Kind::Finite;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!(probs[k] > 0.0)) continue;
    auto it = std::find(out.atoms.begin(), out.atoms.end(), atoms[k]);
    if (it != out.atoms.end()) {
      out.probs[static_cast<std::size_t>(it - out.atoms.begin())] += probs[k];
      continue;
    }
    out.atoms.push_back(std::move(atoms[k]));
    out.probs.push_back(probs[k]);
  }
  for (std::size_t k = 0; k < out.atoms.size(); ++k) {
    out.masks.push_back(skeleton(out.atoms[k]));
    if (out.masks.back().is_all_true()) out.strictly_positive_prob += out.probs[k];
  }
  return out;
}

SupportDescriptor continuous_support(std::vector<SkeletonMask> masks) {
  SupportDescriptor out;
  out.kind = SupportDescriptor::Kind::Continuous;
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  out.masks = std::move(masks);
  return out;
}

SkeletonMask alpha_mask(std::size_t n, const std::vector<double>& alpha) {
  std::vector<std::uint8_t> bits(n * n);
  for (std::size_t k = 0; k < n * n; ++k) bits[k] = alpha[k] > 0.0 ? 1 : 0;
  return {n, std::move(bits)};
}

}  // namespace

SupportDescriptor support(const GeneratorSpec& spec) {
  const std::size_t n = spec.n();
  struct Support {
    std::size_t n;

    SupportDescriptor operator()(const Fixed& m) const { return finite_support({m.matrix}, {1.0}); }
    SupportDescriptor operator()(const FiniteMixture& m) const { return finite_support(m.atoms, m.probs); }
    SupportDescriptor operator()(const DirichletRows& m) const {
      auto out = continuous_support({alpha_mask(n, m.alpha)});
      // Rows with two or more positive alphas have a density on their face,
      // so every drawn entry with alpha > 0 is positive almost surely.
      out.strictly_positive_prob = out.masks.front().is_all_true() ? 1.0 : 0.0;
      return out;
    }
    SupportDescriptor operator()(const PerturbedFixed& m) const {
      auto out = continuous_support({alpha_mask(n, perturbed_alpha(m))});
      out.strictly_positive_prob = 1.0;
      return out;
    }
    SupportDescriptor operator()(const LeaderFollower&) const {
      std::vector<std::uint8_t> low(n * n, 0), high(n * n, 0);
      low[0] = high[0] = 1;
      low[1] = high[1] = 1;
      for (std::size_t i = 1; i < n; ++i) {
        high[i * n + i] = 1;
        low[i * n + (i + 1) % n] = 1;
      }
      return continuous_support({SkeletonMask(n, low), SkeletonMask(n, high)});
    }
    SupportDescriptor operator()(const Encounter2x2& m) const {
      return finite_support({StochasticMatrix::identity(2), encounter_matrix(m.epsilon)}, {1.0 - m.p_meet, m.p_meet});
    }
    SupportDescriptor operator()(const Bernoulli2x2& m) const {
      return finite_support({two_by_two(0.0, 0.0), two_by_two(0.0, m.x), two_by_two(m.x, 0.0), two_by_two(m.x, m.x)},
                            {(1 - m.p_a) * (1 - m.p_b), (1 - m.p_a) * m.p_b, m.p_a * (1 - m.p_b), m.p_a * m.p_b});
    }
    SupportDescriptor operator()(const TwoPointSwap& m) const {
      return finite_support({StochasticMatrix::identity(2), swap_2x2()}, {m.a, 1.0 - m.a});
    }
    SupportDescriptor operator()(const Islands& m) const {
      std::vector<StochasticMatrix> atoms;
      std::vector<double> probs;
      for (const auto& [adj, p] : enumerate_islands(m.g, m.p_s, m.p_d)) {
        atoms.push_back(degree_normalized(adj));
        probs.push_back(p);
      }
      return finite_support(std::move(atoms), std::move(probs));
    }
    SupportDescriptor operator()(const UndirectedDegree& m) const {
      std::vector<StochasticMatrix> atoms;
      for (const auto& g : m.graphs) atoms.push_back(degree_normalized(g));
      return finite_support(std::move(atoms), m.probs);
    }
    SupportDescriptor operator()(const Ar1Mixture& m) const {
      if (m.xi == 0.0) return finite_support({m.start}, {1.0});
      const SupportDescriptor src = support(*m.source);
      if (m.xi == 1.0) return src;
      // X_1 = (1 - xi) T0 + xi Xi_1 carries the union of both patterns.
      const SkeletonMask start_mask = skeleton(m.start);
      if (src.kind == SupportDescriptor::Kind::Finite) {
        std::vector<StochasticMatrix> atoms;
        for (const auto& a : src.atoms) {
          std::vector<double> mix(n * n);
          for (std::size_t e = 0; e < n * n; ++e) mix[e] = (1 - m.xi) * m.start.entries()[e] + m.xi * a.entries()[e];
          atoms.push_back(StochasticMatrix::adopt(n, std::move(mix)));
        }
        return finite_support(std::move(atoms), src.probs);
      }
      std::vector<SkeletonMask> masks;
      double positive = 0.0;
      for (const auto& mask : src.masks) masks.push_back(mask_union(start_mask, mask));
      auto out = continuous_support(std::move(masks));
      for (const auto& mask : out.masks) positive = mask.is_all_true() ? 1.0 : positive;
      out.strictly_positive_prob = std::max(positive, src.strictly_positive_prob);
      return out;
    }
  };
  return std::visit(Support{n}, spec.model());
}

std::vector<double> alpha_row_sums(std::size_t n, const std::vector<double>& alpha) {
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i] += alpha[i * n + j];
  return r;
}

bool is_balanced(std::size_t n, const std::vector<double>& alpha, double tol) {
  if (alpha.size() != n * n) raise(Errc::DimensionMismatch, "alpha must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += alpha[i * n + j];
      col += alpha[j * n + i];
    }
    if (std::abs(row - col) > tol) return false;
  }
  return true;
}

std::vector<double> dirichlet_parameters(const GeneratorSpec& spec) {
  if (const auto* m = spec.as<DirichletRows>()) return m->alpha;
  if (const auto* m = spec.as<PerturbedFixed>()) return perturbed_alpha(*m);
  raise(Errc::Unsupported, std::string("model '") + std::string(spec.kind()) + "' has no Dirichlet row parameters");
}

}  // namespace degroot

#include <gtest/gtest.h>

#include <cmath>

#include "degroot/fragmentation.hpp"
#include "degroot/generators.hpp"
#include "oracles.hpp"

using namespace degroot;

namespace {

std::vector<GeneratorSpec> catalogue() {
  const auto t = make_stochastic({{0.6, 0.3, 0.1}, {0.2, 0.5, 0.3}, {0.3, 0.3, 0.4}});
  return {
      fixed(t),
      mixture({StochasticMatrix::identity(2), StochasticMatrix::uniform(2)}, {0.3, 0.7}),
      correlated_encounter_2x2(0.3, 0.4, 0.7),
      dirichlet_rows(3, {1, 2, 0, 0.5, 0.5, 1, 2, 0, 0.3}),
      ring_uniform_self(4),
      leader_follower(4),
      perturbed_fixed(t, 5.0),
      encounter_2x2(0.2, 0.6),
      bernoulli_2x2(0.7, 0.4, 0.8),
      two_point_swap(0.3),
      islands_graphs(2, 0.8, 0.3),
      undirected_degree({SkeletonMask(3, {1, 1, 0, 1, 0, 1, 0, 1, 1}), SkeletonMask(3, {1, 0, 1, 0, 1, 1, 1, 1, 0})},
                        {0.5, 0.5}),
      ar1_mixture(0.4, t, dirichlet_rows(3, std::vector<double>(9, 1.0))),
      two_block_decay_model(4, 0.3),
      stubborn_third_mixture(0.3, 0.5),
      average_or_identity(5, 0.4),
  };
}

void expect_stochastic(const StochasticMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

}  // namespace

TEST(Dirichlet, SampleMomentsMatchClosedForm) {
  for (const std::vector<double> alpha : {std::vector<double>{1, 1, 1}, {0.3, 0.5, 2.0}, {4, 0, 1}, {0.05, 0.1}}) {
    Rng rng(11);
    const std::size_t draws = 200000;
    std::vector<double> out(alpha.size()), sum(alpha.size(), 0.0), sq(alpha.size(), 0.0);
    for (std::size_t k = 0; k < draws; ++k) {
      sample_dirichlet(rng, alpha, out);
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        sum[i] += out[i];
        sq[i] += out[i] * out[i];
      }
    }
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const auto want = oracle::dirichlet_marginal(alpha, i);
      const double mean = sum[i] / draws, var = sq[i] / draws - mean * mean;
      const double se = std::sqrt(want.variance / draws);
      EXPECT_NEAR(mean, want.mean, 4 * se + 1e-12) << "alpha index " << i;
      EXPECT_NEAR(var, want.variance, 0.03 * want.variance + 1e-12) << "alpha index " << i;
      if (alpha[i] == 0.0) EXPECT_EQ(sum[i], 0.0);
    }
  }
}

TEST(Generators, FixedRepeatsItsMatrix) {
  const auto t = make_stochastic({{0.2, 0.8}, {0.6, 0.4}});
  Generator gen(fixed(t), 3);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(gen.next(), t);
  EXPECT_EQ(gen.steps(), 5U);
}

TEST(Generators, Ar1Endpoints) {
  const auto t0 = make_stochastic({{0.9, 0.1, 0}, {0, 0.9, 0.1}, {0.1, 0, 0.9}});
  Generator frozen(ar1_mixture(0.0, t0, ring_uniform_self(3)), 4);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(frozen.next(), t0);

  Generator iid(ar1_mixture(1.0, t0, ring_uniform_self(3)), 4);
  const auto ring_mask = skeleton(make_stochastic({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}));
  const auto first = iid.next();
  EXPECT_EQ(skeleton(first), ring_mask);
  EXPECT_NE(iid.next(), first);
}

TEST(Generators, Ar1RowsStayStochastic) {
  const auto t0 = make_stochastic({{0.95, 0.05}, {0.05, 0.95}});
  for (double xi : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    Generator gen(ar1_mixture(xi, t0, dirichlet_rows(2, {0.3, 0.3, 0.3, 0.3})), 5);
    for (int k = 0; k < 200; ++k) expect_stochastic(gen.next());
  }
}

TEST(Generators, DeterministicStreams) {
  for (const auto& spec : catalogue()) {
    Generator a(spec, 99), b(spec, 99);
    for (int k = 0; k < 20; ++k) EXPECT_EQ(a.next(), b.next()) << spec.kind();
  }
}

TEST(Generators, DrawsAreStochastic) {
  for (const auto& spec : catalogue()) {
    Generator gen(spec, 7);
    for (int k = 0; k < 50; ++k) expect_stochastic(gen.next());
  }
}

TEST(MeanMatrix, Examples) {
  const double zeta = 0.3;
  const auto mean = mean_matrix(average_or_identity(4, zeta));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(mean(i, j), (i == j ? 1 - zeta : 0.0) + zeta / 4, 1e-15);
  const auto t = make_stochastic({{0.5, 0.5}, {0.2, 0.8}});
  EXPECT_LE(max_abs_difference(mean_matrix(perturbed_fixed(t, 3.0)), t), 1e-15);
  EXPECT_LE(max_abs_difference(mean_matrix(two_point_swap(0.3)), make_stochastic({{0.3, 0.7}, {0.7, 0.3}})), 1e-15);
  const auto dir = mean_matrix(dirichlet_rows(2, {1, 3, 2, 2}));
  EXPECT_NEAR(dir(0, 1), 0.75, 1e-15);
}

TEST(MeanMatrix, MatchesEmpiricalMean) {
  for (const auto& spec : catalogue()) {
    const std::size_t n = spec.n(), draws = 100000;
    std::vector<double> acc(n * n, 0.0);
    Generator gen(spec, 13);
    for (std::size_t k = 0; k < draws; ++k) {
      const auto m = gen.next();
      for (std::size_t e = 0; e < n * n; ++e) acc[e] += m.entries()[e];
    }
    const auto mean = mean_matrix(spec);
    if (spec.kind() == "ar1_mixture") continue;  // long-run mean only; checked below
    for (std::size_t e = 0; e < n * n; ++e) EXPECT_NEAR(acc[e] / draws, mean.entries()[e], 5e-3) << spec.kind();
  }
}

TEST(MeanMatrix, LeaderFollowerRowsAreCorrelated) {
  const auto mean = mean_matrix(leader_follower(3));
  EXPECT_NEAR(mean(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(mean(1, 1), 0.5, 1e-15);
  EXPECT_NEAR(mean(1, 2), 0.5, 1e-15);
  // Row 0 and row 1 share the draw: agent 1 listens to agent 2 exactly when x < 1/2.
  Generator gen(leader_follower(3), 17);
  for (int k = 0; k < 200; ++k) {
    const auto m = gen.next();
    const bool follows = m(0, 0) < 0.5;
    EXPECT_EQ(m(1, 2), follows ? 1.0 : 0.0);
    EXPECT_EQ(m(2, 0), follows ? 1.0 : 0.0);
    EXPECT_NEAR(m(0, 0) + m(0, 1), 1.0, 1e-15);
  }
}

TEST(Stationarity, FirstAndFiftiethDrawAgree) {
  for (const auto& spec : {correlated_encounter_2x2(0.3, 0.2, 0.9), ring_uniform_self(3), bernoulli_2x2(0.6, 0.3, 0.7),
                           // start equals the source mean, so entry means do not drift
                           ar1_mixture(0.3, StochasticMatrix::uniform(2), dirichlet_rows(2, {1, 1, 1, 1}))}) {
    const std::size_t n = spec.n(), seeds = 5000;
    std::vector<double> s1(n * n, 0), q1(n * n, 0), s50(n * n, 0), q50(n * n, 0);
    for (std::size_t k = 0; k < seeds; ++k) {
      Generator gen(spec, replica_seed(21, k));
      const auto x1 = gen.next();
      StochasticMatrix x50;
      for (int t = 2; t <= 50; ++t) x50 = gen.next();
      for (std::size_t e = 0; e < n * n; ++e) {
        s1[e] += x1.entries()[e];
        q1[e] += x1.entries()[e] * x1.entries()[e];
        s50[e] += x50.entries()[e];
        q50[e] += x50.entries()[e] * x50.entries()[e];
      }
    }
    for (std::size_t e = 0; e < n * n; ++e) {
      const double m1 = s1[e] / seeds, m50 = s50[e] / seeds;
      const double v = (q1[e] / seeds - m1 * m1) + (q50[e] / seeds - m50 * m50);
      EXPECT_LE(std::abs(m1 - m50), 3 * std::sqrt(v / seeds) + 1e-12) << spec.kind() << " entry " << e;
    }
  }
}

TEST(Support, Examples) {
  const auto enc = support(encounter_2x2(0.3, 0.5));
  ASSERT_EQ(enc.kind, SupportDescriptor::Kind::Finite);
  ASSERT_EQ(enc.atoms.size(), 2U);
  EXPECT_EQ(enc.atoms[0], StochasticMatrix::identity(2));
  EXPECT_EQ(enc.atoms[1], make_stochastic({{0.7, 0.3}, {0.3, 0.7}}));

  const auto sw = support(two_point_swap(0.4));
  ASSERT_EQ(sw.atoms.size(), 2U);
  EXPECT_NEAR(sw.probs[0] + sw.probs[1], 1.0, 1e-15);

  const auto dir = support(dirichlet_rows(3, std::vector<double>(9, 0.5)));
  EXPECT_EQ(dir.kind, SupportDescriptor::Kind::Continuous);
  EXPECT_EQ(dir.strictly_positive_prob, 1.0);
  ASSERT_EQ(dir.masks.size(), 1U);
  EXPECT_TRUE(dir.masks[0].is_all_true());

  const auto ring = support(ring_uniform_self(4));
  EXPECT_EQ(ring.strictly_positive_prob, 0.0);
  EXPECT_EQ(ring.masks[0].count(), 8U);
}

TEST(Support, FiniteAtomsListedOnce) {
  const auto s = support(mixture({StochasticMatrix::identity(2), StochasticMatrix::identity(2)}, {0.5, 0.5}));
  ASSERT_EQ(s.atoms.size(), 1U);
  EXPECT_EQ(s.probs[0], 1.0);
}

TEST(Ring, MatchesDirichletRows) {
  const std::size_t n = 5;
  const auto alpha = dirichlet_parameters(ring_uniform_self(n));
  EXPECT_TRUE(is_balanced(n, alpha));
  for (double r : alpha_row_sums(n, alpha)) EXPECT_EQ(r, 2.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      EXPECT_EQ(alpha[i * n + j], (j == i || j == (i + 1) % n) ? 1.0 : 0.0);
  const auto two = dirichlet_parameters(ring_uniform_self(2));
  EXPECT_EQ(two, std::vector<double>(4, 1.0));
}

TEST(Balance, DetectedIffRowAndColumnSumsMatch) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 4;
    std::vector<double> alpha(n * n);
    for (auto& a : alpha) a = u(rng);
    if (k % 2 == 0)  // symmetrize: always balanced
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) alpha[i * n + j] = alpha[j * n + i];
    bool expected = true;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0, col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        row += alpha[i * n + j];
        col += alpha[j * n + i];
      }
      expected = expected && std::abs(row - col) <= 1e-9;
    }
    EXPECT_EQ(is_balanced(n, alpha), expected);
  }
}

TEST(Validation, RejectsMalformedSpecs) {
  EXPECT_ERRC(mixture({StochasticMatrix::identity(2)}, {0.9}), Errc::InvalidProbability);
  EXPECT_ERRC(mixture({StochasticMatrix::identity(2), StochasticMatrix::identity(3)}, {0.5, 0.5}),
              Errc::DimensionMismatch);
  EXPECT_ERRC(dirichlet_rows(2, {1, -1, 1, 1}), Errc::InvalidArgument);
  EXPECT_ERRC(dirichlet_rows(2, {0, 0, 1, 1}), Errc::InvalidArgument);
  EXPECT_ERRC(perturbed_fixed(StochasticMatrix::identity(2), 1.0), Errc::NotStrictlyPositive);
  EXPECT_ERRC(encounter_2x2(1.0, 0.5), Errc::InvalidArgument);
  EXPECT_ERRC(islands_graphs(2, 1.2, 0.1), Errc::InvalidProbability);
  EXPECT_ERRC(two_point_swap(1.0), Errc::InvalidProbability);
  EXPECT_ERRC(undirected_degree({SkeletonMask(3, {0, 1, 1, 1, 0, 0, 1, 0, 0}), SkeletonMask(3, {0, 1, 0, 1, 0, 1, 0, 1, 0})},
                                {0.5, 0.5}),
              Errc::InvalidArgument);
  EXPECT_ERRC(markov_mixture({StochasticMatrix::identity(2), StochasticMatrix::uniform(2)}, {0.5, 0.5},
                             {{0.9, 0.1}, {0.5, 0.5}}),
              Errc::InvalidProbability);
}

TEST(Islands, HomophilyAndCrossLinks) {
  EXPECT_TRUE(homophily(Islands{3, 0.8, 0.2}));
  EXPECT_FALSE(homophily(Islands{3, 0.2, 0.8}));
  Generator gen(islands_graphs(3, 0.9, 0.0), 31);
  for (int k = 0; k < 200; ++k) {
    const auto m = gen.next();
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 3; j < 6; ++j) EXPECT_EQ(m(i, j), 0.0);
  }
  const auto atoms = enumerate_islands(2, 0.7, 0.4);
  double total = 0.0;
  for (const auto& a : atoms) total += a.second;
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Perturbed, InfluenceIsStationaryVector) {
  const auto t = make_stochastic({{0.6, 0.4}, {0.3, 0.7}});
  const auto spec = perturbed_fixed(t, 4.0);
  const auto* p = spec.as<PerturbedFixed>();
  ASSERT_NE(p, nullptr);
  EXPECT_NEAR(p->influence[0], 3.0 / 7.0, 1e-12);
  const auto alpha = dirichlet_parameters(spec);
  EXPECT_TRUE(is_balanced(2, alpha));
}

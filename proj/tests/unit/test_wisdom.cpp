#include <gtest/gtest.h>

#include <cmath>

#include "degroot/engine.hpp"
#include "degroot/matrix.hpp"
#include "degroot/wisdom.hpp"
#include "oracles.hpp"

using namespace degroot;

TEST(ConsensusProbability, ClosedForm) {
  EXPECT_EQ(consensus_probability(1, 0.3), 0.3);
  EXPECT_NEAR(consensus_probability(2, 0.5), 0.75, 1e-15);
  for (std::size_t k = 1; k <= 30; ++k)
    for (double phi : {0.0, 0.01, 0.2, 0.5, 0.9, 1.0})
      EXPECT_NEAR(consensus_probability(k, phi), double(1.0L - std::pow(1.0L - phi, (long double)k)), 4e-15);
  EXPECT_ERRC(consensus_probability(0, 0.5), Errc::InvalidArgument);
  EXPECT_ERRC(consensus_probability(3, 1.5), Errc::InvalidProbability);
}

TEST(Mic3Rates, RingQualifiesStarDoesNot) {
  const std::vector<std::size_t> sizes{5, 10, 20, 40, 80};
  const auto ring = check_mic3_rates(ring_alphas, sizes);
  EXPECT_TRUE(ring.qualifies);
  EXPECT_NEAR(ring.m_fit, 1.0, 0.05);

  const auto star = check_mic3_rates(star_alphas, sizes);
  EXPECT_FALSE(star.qualifies);
  EXPECT_LT(star.m_fit, kDecayingRatioSlope);

  // phi = (n-1, 1, ..., 1): the largest share stays exactly 1/2.
  const auto flat = check_mic3_rates(
      [](std::size_t n) {
        std::vector<double> phi(n, 1.0);
        phi[0] = double(n - 1);
        return product_alphas(phi);
      },
      sizes);
  EXPECT_NEAR(flat.m_fit, 0.0, 1e-12);
  EXPECT_FALSE(flat.qualifies);

  std::vector<double> unbalanced(9, 1.0);
  unbalanced[1] = 3.0;
  EXPECT_ERRC(check_mic3_rates([&](std::size_t) { return unbalanced; }, {3, 3, 3, 3}), Errc::BalanceViolation);
}

TEST(Mic3Rates, ProductAlphasAreBalanced) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> phi(2 + k % 6);
    for (auto& p : phi) p = u(rng);
    const auto alpha = product_alphas(phi);
    EXPECT_TRUE(is_balanced(phi.size(), alpha));
    const auto sums = alpha_row_sums(phi.size(), alpha);
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(sums[i], phi[i], 1e-12);
  }
}

TEST(LeastSquares, Slope) {
  EXPECT_NEAR(ls_slope({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-14);
  EXPECT_NEAR(ls_slope({0, 1, 2}, {1, 1, 1}), 0.0, 1e-15);
}

TEST(Conjugacy, BalancedDirichletMatchesMarginals) {
  const auto r = dirichlet_conjugacy_test(dirichlet_rows(3, product_alphas({2.0, 1.0, 0.5})), 4000, 62, 20000);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.phi, (std::vector<double>{2.0, 1.0, 0.5}));
  const auto want = oracle::dirichlet_marginal({2.0, 1.0, 0.5}, 0);
  EXPECT_NEAR(r.expected_mean[0], want.mean, 1e-15);
  EXPECT_NEAR(r.expected_variance[0], want.variance, 1e-15);
}

TEST(Conjugacy, WrongPhiIsRejected) {
  const auto r = dirichlet_conjugacy_test(ring_uniform_self(4), {1.0, 3.0, 1.0, 3.0}, 4000, 63, 20000);
  EXPECT_FALSE(r.pass);
  std::vector<double> unbalanced(4, 1.0);
  unbalanced[1] = 2.0;
  EXPECT_ERRC(dirichlet_conjugacy_test(dirichlet_rows(2, unbalanced), 10, 1), Errc::BalanceViolation);
  EXPECT_ERRC(dirichlet_conjugacy_test(leader_follower(3), 10, 1), Errc::Unsupported);
}

TEST(MeanRankOne, Examples) {
  const auto ring = mean_rank_one_test(ring_uniform_self(4), 400, 5000, 64);
  EXPECT_EQ(ring.rank, 1U);
  EXPECT_EQ(ring.strict_positive_fraction, 1.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(ring.mean_limit(i, j), 0.25, 0.03);

  EXPECT_ERRC(mean_rank_one_test(two_point_swap(0.5), 100, 50, 65), Errc::PreconditionUnmet);
  const auto forced = mean_rank_one_test(two_point_swap(0.5), 400, 50, 65, true);
  EXPECT_EQ(forced.strict_positive_fraction, 0.0);
  // The average of I and the swap is 11'/2.
  EXPECT_EQ(forced.rank, 1U);
}

TEST(Signals, LawsAndValidation) {
  EXPECT_NEAR(signal_variance(UniformSignal{0.25}, 0.5), 0.25 * 0.25 / 3.0, 1e-15);
  EXPECT_NEAR(signal_variance(BernoulliSignal{}, 0.3), 0.21, 1e-15);
  EXPECT_NEAR(signal_variance(CustomSignal{{0.0, 0.4, 1.0}, {0.25, 0.5, 0.25}}, 0.45), 0.1275, 1e-15);
  EXPECT_ERRC(validate_signal(UniformSignal{0.4}, 0.8), Errc::InvalidArgument);
  EXPECT_ERRC(validate_signal(CustomSignal{{0.0, 1.0}, {0.5, 0.5}}, 0.3), Errc::InvalidArgument);
  EXPECT_ERRC(validate_signal(CustomSignal{{0.3}, {1.0}}, 0.3), Errc::InvalidArgument);

  Rng rng(66);
  double s = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double v = draw_signal(rng, UniformSignal{0.2}, 0.6);
    ASSERT_GE(v, 0.4);
    ASSERT_LE(v, 0.8);
    s += v;
  }
  EXPECT_NEAR(s / 100000, 0.6, 0.002);
}

TEST(Wisdom, ErrorShrinksOnRingAndObeysChebyshevBound) {
  WisdomConfig cfg;
  cfg.family = {"ring_uniform_self", 0.0};
  cfg.sizes = {4, 8, 16};
  cfg.replicas = 300;
  cfg.t_max = 50000;
  cfg.seed = 67;
  const auto res = run_wisdom(cfg);
  ASSERT_EQ(res.per_size.size(), 3U);
  const double var = signal_variance(cfg.signal, cfg.gamma);
  for (std::size_t k = 0; k < res.per_size.size(); ++k) {
    const auto& s = res.per_size[k];
    EXPECT_FALSE(s.status.has_value());
    EXPECT_EQ(s.convergence_fraction, 1.0);
    EXPECT_LE(s.mean_abs_error, 1.1 * std::sqrt(var * s.e_max_pi));
    EXPECT_LE(s.q50, s.q90);
    if (k > 0) {
      EXPECT_LT(s.mean_abs_error, res.per_size[k - 1].mean_abs_error);
      EXPECT_LT(s.e_max_pi, res.per_size[k - 1].e_max_pi);
    }
  }
}

TEST(Wisdom, CyclicShiftNeverConverges) {
  WisdomConfig cfg;
  cfg.family = {"ring_fixed", 0.0};
  cfg.sizes = {4, 8};
  cfg.replicas = 20;
  cfg.t_max = 500;
  const auto res = run_wisdom(cfg);
  for (const auto& s : res.per_size) {
    EXPECT_EQ(s.convergence_fraction, 0.0);
    EXPECT_EQ(s.status, std::optional<Errc>(Errc::NoConvergence));
  }
}

TEST(Wisdom, FamiliesByName) {
  EXPECT_EQ(make_family({"star", 0.0}, 4).kind(), "dirichlet_rows");
  EXPECT_EQ(make_family({"ring_fixed", 0.0}, 4).kind(), "fixed");
  EXPECT_ERRC(make_family({"nope", 0.0}, 4), Errc::InvalidArgument);
}

TEST(Conjugacy, LeaderFollowerAndPerturbed) {
  const auto leader = dirichlet_conjugacy_test(leader_follower(3), {2.0, 2.0, 2.0}, 4000, 68, 20000);
  EXPECT_TRUE(leader.pass);

  const auto t = make_stochastic({{0.5, 0.4, 0.1}, {0.2, 0.5, 0.3}, {0.1, 0.5, 0.4}});
  const auto perturbed = dirichlet_conjugacy_test(perturbed_fixed(t, 6.0), 4000, 69, 20000);
  const auto s = stationary_distribution(t);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(perturbed.phi[i], 6.0 * s[i], 1e-12);
  EXPECT_TRUE(perturbed.pass);
}

TEST(PerturbedNetwork, ChebyshevBoundOnInfluenceSpread) {
  const std::size_t n = 4, replicas = 4000;
  const double eps = 10.0;
  const auto est = estimate_influence(perturbed_fixed(StochasticMatrix::uniform(n), eps), replicas, 20000, kGapTol, 70);
  for (double tau : {0.1, 0.2, 0.3}) {
    std::size_t hits = 0;
    for (const auto& v : est.samples) {
      double worst = 0.0;
      for (double p : v) worst = std::max(worst, std::abs(p - 1.0 / n));
      if (worst >= tau) ++hits;
    }
    const double freq = double(hits) / replicas;
    const double se = std::sqrt(freq * (1 - freq) / replicas);
    EXPECT_LE(freq, (1.0 / (eps * tau * tau)) * (1.0 - 1.0 / n) + 3 * se) << tau;
  }
}

TEST(Wisdom, AverageOrIdentityGivesEqualInfluence) {
  WisdomConfig cfg;
  cfg.family = {"average_or_identity", 0.5};
  cfg.sizes = {3, 6, 12};
  cfg.replicas = 200;
  cfg.seed = 71;
  const auto res = run_wisdom(cfg);
  for (std::size_t k = 0; k < res.per_size.size(); ++k) {
    EXPECT_NEAR(res.per_size[k].e_max_pi, 1.0 / double(cfg.sizes[k]), 1e-12);
    EXPECT_NEAR(res.per_size[k].var_max_pi, 0.0, 1e-20);
    if (k > 0) EXPECT_LT(res.per_size[k].mean_abs_error, res.per_size[k - 1].mean_abs_error);
  }
}

TEST(MeanRankOne, EncounterAverageIsRankOne) {
  const auto r = mean_rank_one_test(encounter_2x2(0.3, 0.5), 500, 300, 72);
  EXPECT_EQ(r.rank, 1U);
  EXPECT_GT(r.strict_positive_fraction, 0.99);
}

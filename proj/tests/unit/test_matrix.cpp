#include <gtest/gtest.h>

#include <complex>

#include "degroot/matrix.hpp"
#include "oracles.hpp"

using namespace degroot;

TEST(MakeStochastic, AcceptsIdentityAndAveraging) {
  EXPECT_EQ(make_stochastic({{1, 0}, {0, 1}}), StochasticMatrix::identity(2));
  EXPECT_EQ(make_stochastic({{0.5, 0.5}, {0.5, 0.5}}), StochasticMatrix::uniform(2));
}

TEST(MakeStochastic, RejectsBadRows) {
  EXPECT_ERRC(make_stochastic({{0.6, 0.5}, {0, 1}}), Errc::RowSumViolation);
  EXPECT_ERRC(make_stochastic({{1.1, -0.1}, {0, 1}}), Errc::NegativeEntry);
  EXPECT_ERRC(make_stochastic({{1, 0}, {0, 1, 0}}), Errc::DimensionMismatch);
}

TEST(MakeStochastic, RowsSumToOneAfterRenormalizing) {
  const auto m = make_stochastic({{0.3 + 1e-13, 0.7}, {0.1, 0.9}});
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(m(i, 0) + m(i, 1), 1.0, 1e-15);
}

TEST(Multiply, Examples) {
  std::mt19937_64 rng(1);
  const auto m = oracle::random_stochastic(rng, 4);
  EXPECT_LE(max_abs_difference(multiply(StochasticMatrix::identity(4), m), m), 1e-15);
  const auto swap = make_stochastic({{0, 1}, {1, 0}});
  EXPECT_EQ(multiply(swap, swap), StochasticMatrix::identity(2));
  EXPECT_EQ(multiply(make_stochastic({{1, 0}, {0, 1}}), make_stochastic({{0.5, 0.5}, {0.5, 0.5}})),
            StochasticMatrix::uniform(2));
  EXPECT_ERRC(multiply(swap, m), Errc::DimensionMismatch);
}

TEST(Multiply, MatchesDenseProductAndStaysStochastic) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 300; ++k) {
    const std::size_t n = 2 + k % 6;
    const auto a = oracle::random_stochastic(rng, n, 0.4), b = oracle::random_stochastic(rng, n, 0.4);
    const auto ab = multiply(a, b);
    EXPECT_LE(oracle::max_diff(oracle::dense(ab), oracle::matmul(oracle::dense(a), oracle::dense(b))), 1e-14);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (double v : ab.row(i)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(LeftMultiply, AgreesWithMultiply) {
  std::mt19937_64 rng(3);
  std::vector<double> scratch;
  for (int k = 0; k < 50; ++k) {
    const auto a = oracle::random_stochastic(rng, 5, 0.6), b = oracle::random_stochastic(rng, 5);
    auto c = b;
    c.left_multiply_by(a, scratch);
    EXPECT_LE(max_abs_difference(c, multiply(a, b)), 1e-15);
  }
}

TEST(Skeleton, Examples) {
  const auto x = make_stochastic({{0.9, 0.1}, {1, 0}});
  const auto y = make_stochastic({{2.0 / 3, 1.0 / 3}, {1, 0}});
  EXPECT_EQ(skeleton(x), SkeletonMask(2, {1, 1, 1, 0}));
  EXPECT_EQ(skeleton(StochasticMatrix::identity(3)), SkeletonMask(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(skeleton(y), skeleton(x));
  EXPECT_TRUE(same_skeleton(x, y));
  EXPECT_FALSE(same_skeleton(StochasticMatrix::identity(2), make_stochastic({{0, 1}, {1, 0}})));
  EXPECT_TRUE(same_skeleton(x, x));
  EXPECT_ERRC(same_skeleton(x, StochasticMatrix::identity(3)), Errc::DimensionMismatch);
}

TEST(Skeleton, ThresholdIsApplied) {
  const auto m = make_stochastic({{1.0 - 1e-13, 1e-13}, {0.5, 0.5}});
  EXPECT_FALSE(skeleton(m)(0, 1));
  EXPECT_TRUE(skeleton(m, 1e-14)(0, 1));
}

TEST(Skeleton, SameSkeletonIsAnEquivalence) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 500; ++k) {
    const auto a = oracle::random_stochastic(rng, 3, 0.5), b = oracle::random_stochastic(rng, 3, 0.5),
               c = oracle::random_stochastic(rng, 3, 0.5);
    EXPECT_TRUE(same_skeleton(a, a));
    EXPECT_EQ(same_skeleton(a, b), same_skeleton(b, a));
    if (same_skeleton(a, b) && same_skeleton(b, c)) EXPECT_TRUE(same_skeleton(a, c));
  }
}

TEST(Positivity, Examples) {
  EXPECT_TRUE(is_strictly_positive(StochasticMatrix::uniform(2)));
  EXPECT_FALSE(is_strictly_positive(StochasticMatrix::identity(2)));
  EXPECT_FALSE(is_strictly_positive(StochasticMatrix::cyclic_shift(5)));
}

TEST(Bistochastic, Examples) {
  EXPECT_TRUE(is_bistochastic(make_stochastic({{0.8, 0.2}, {0.2, 0.8}})));
  EXPECT_FALSE(is_bistochastic(make_stochastic({{0.9, 0.1}, {1, 0}})));
  EXPECT_TRUE(is_bistochastic(StochasticMatrix::uniform(7)));
}

TEST(Dobrushin, Examples) {
  EXPECT_DOUBLE_EQ(dobrushin_coefficient(make_stochastic({{0.3, 0.7}, {0.3, 0.7}})), 0.0);
  EXPECT_DOUBLE_EQ(dobrushin_coefficient(StochasticMatrix::identity(2)), 1.0);
  EXPECT_NEAR(dobrushin_coefficient(make_stochastic({{0.5, 0.5}, {0.25, 0.75}})), 0.25, 1e-15);
}

TEST(Dobrushin, SubmultiplicativeAndBelowOneOnPositive) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto a = oracle::random_stochastic(rng, n, 0.3), b = oracle::random_stochastic(rng, n, 0.3);
    const double ca = dobrushin_coefficient(a), cb = dobrushin_coefficient(b);
    EXPECT_GE(ca, 0.0);
    EXPECT_LE(ca, 1.0);
    EXPECT_LE(dobrushin_coefficient(multiply(a, b)), ca * cb + 1e-12);
    if (is_strictly_positive(a)) EXPECT_LT(ca, 1.0);
  }
}

TEST(Lambda2, Examples) {
  EXPECT_NEAR(lambda2_2x2(make_stochastic({{0.7, 0.3}, {0.2, 0.8}})), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(lambda2_2x2(make_stochastic({{0.4, 0.6}, {0.4, 0.6}})), 0.0);
  EXPECT_DOUBLE_EQ(lambda2_2x2(StochasticMatrix::identity(2)), 1.0);
  EXPECT_ERRC(lambda2_2x2(StochasticMatrix::identity(3)), Errc::DimensionMismatch);
}

TEST(Lambda2, MatchesCharacteristicPolynomial) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 1000; ++k) {
    const auto m = oracle::random_stochastic(rng, 2);
    const double tr = m(0, 0) + m(1, 1), det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det));
    const auto r1 = (tr + disc) / 2.0, r2 = (tr - disc) / 2.0;
    const double second = std::abs(r1) < std::abs(r2) ? r1.real() : r2.real();
    EXPECT_NEAR(lambda2_2x2(m), second, 1e-10);
  }
}

TEST(NumericRank, Examples) {
  EXPECT_EQ(numeric_rank(make_stochastic({{0.3, 0.7}, {0.3, 0.7}})).numeric_rank, 1U);
  EXPECT_EQ(numeric_rank(StochasticMatrix::identity(3)).numeric_rank, 3U);
  EXPECT_EQ(numeric_rank(make_stochastic({{0, 0, 1}, {0, 0, 1}, {0.5, 0.5, 0}})).numeric_rank, 2U);
  const auto r = numeric_rank(StochasticMatrix::identity(3));
  EXPECT_EQ(r.singular_values.size(), 3U);
  EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
}

TEST(NumericRank, RankOneIffZeroSpread) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 2 + k % 5;
    const auto row = oracle::random_stochastic(rng, n).to_rows()[0];
    const auto rank_one = make_stochastic(oracle::Dense(n, row));
    EXPECT_EQ(distance_to_rank_one(rank_one), 0.0);
    EXPECT_EQ(numeric_rank(rank_one).numeric_rank, 1U);
    const auto full = oracle::random_stochastic(rng, n);
    EXPECT_EQ(distance_to_rank_one(full) == 0.0, numeric_rank(full).numeric_rank == 1);
  }
}

TEST(DistanceToRankOne, Examples) {
  EXPECT_EQ(distance_to_rank_one(StochasticMatrix::uniform(3)), 0.0);
  EXPECT_EQ(distance_to_rank_one(StochasticMatrix::identity(2)), 1.0);
  EXPECT_NEAR(distance_to_rank_one(make_stochastic({{0.6, 0.4}, {0.5, 0.5}})), 0.1, 1e-15);
}

TEST(Primitivity, Examples) {
  EXPECT_TRUE(skeleton_is_primitive(SkeletonMask::all_true(3)));
  EXPECT_FALSE(skeleton_is_primitive(SkeletonMask(2, {0, 1, 1, 0})));
  // Ring with self loops, checked against explicit boolean powers.
  const std::size_t n = 6;
  std::vector<std::uint8_t> bits(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) bits[i * n + i] = bits[i * n + (i + 1) % n] = 1;
  const SkeletonMask ring(n, bits);
  EXPECT_TRUE(skeleton_is_primitive(ring));
  SkeletonMask p = ring;
  for (std::size_t k = 1; k < n - 1; ++k) p = boolean_product(p, ring);
  EXPECT_TRUE(p.is_all_true());
  EXPECT_FALSE(skeleton_is_primitive(ring, n - 2));
  EXPECT_EQ(wielandt_bound(4), 10U);
}

TEST(Stationary, MatchesHighPower) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 20; ++k) {
    const auto t = oracle::random_stochastic(rng, 4);
    const auto s = stationary_distribution(t);
    const auto big = oracle::power(oracle::dense(t), 1U << 12);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(s[j], big[0][j], 1e-10);
  }
}

TEST(DistanceToUniform, ZeroOnAveraging) {
  EXPECT_NEAR(distance_to_uniform(StochasticMatrix::uniform(4)), 0.0, 1e-15);
  EXPECT_NEAR(distance_to_uniform(StochasticMatrix::identity(2)), 1.0, 1e-12);
}

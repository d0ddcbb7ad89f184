#include <gtest/gtest.h>

#include <limits>

#include "degroot/serialize.hpp"
#include "oracles.hpp"

using namespace degroot;

namespace {

std::vector<GeneratorSpec> spec_catalogue() {
  return {fixed(make_stochastic({{0.25, 0.75}, {0.6, 0.4}})),
          two_point_swap(0.3),
          markov_mixture({StochasticMatrix::identity(2), swap_2x2()}, {2.0 / 3.0, 1.0 / 3.0}, {{0.9, 0.1}, {0.2, 0.8}}),
          ring_uniform_self(4),
          dirichlet_rows(2, {0.5, 0.0, 1.5, 2.0}),
          perturbed_fixed(StochasticMatrix::uniform(3), 0.1),
          leader_follower(4),
          encounter_2x2(0.3, 0.5),
          correlated_encounter_2x2(0.2, 0.4, 0.7),
          bernoulli_2x2(0.6, 0.3, 0.8),
          islands_graphs(2, 0.6, 0.2),
          undirected_degree({SkeletonMask::all_true(3)}, {1.0}),
          ar1_mixture(0.4, StochasticMatrix::uniform(3), ring_uniform_self(3))};
}

ExperimentConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto specs = spec_catalogue();
  ExperimentConfig c;
  c.command = rng() % 2 ? "influence" : "wisdom";
  c.seed = rng();
  c.output = rng() % 2 ? "" : "out.csv";
  c.format = rng() % 2 ? "csv" : "json";
  c.threads = rng() % 5;
  if (rng() % 3) c.model = specs[rng() % specs.size()];
  if (rng() % 3 == 0) c.model_b = specs[rng() % specs.size()];
  if (rng() % 3 == 0) c.dist = islands_distribution(2, 0.5, u(rng) * 0.9 + 0.05);
  if (rng() % 2) {
    WisdomConfig w;
    w.family = {rng() % 2 ? "star" : "average_or_identity", u(rng)};
    w.sizes = {1 + rng() % 10, 20 + rng() % 10};
    w.gamma = 0.3 + 0.4 * u(rng);
    w.signal = rng() % 2 ? SignalLaw{BernoulliSignal{}} : SignalLaw{UniformSignal{0.1 * u(rng)}};
    w.seed = rng();
    c.wisdom = w;
  }
  c.p0.resize(rng() % 4);
  for (auto& p : c.p0) p = u(rng);
  c.replicas = 1 + rng() % 100000;
  c.t_max = 1 + rng() % 100000;
  c.gap_tol = u(rng) * 1e-5;
  c.phi = u(rng) * 1e-3;
  c.epsilon = u(rng);
  c.t_grid = {1 + rng() % 5, 10 + rng() % 5};
  c.atom_tol = u(rng) * 1e-3;
  c.max_len = rng() % 20;
  c.dedup_tol = u(rng) * 1e-9;
  c.allow_no_positive = rng() % 2;
  return c;
}

}  // namespace

TEST(Serialize, ConfigRoundTrip) {
  std::mt19937_64 rng(81);
  for (int k = 0; k < 200; ++k) {
    const auto c = random_config(rng);
    const auto back = config_from_json(Json::parse(config_to_json(c).dump()));
    ASSERT_TRUE(back == c) << config_to_json(c).dump();
  }
}

TEST(Serialize, SpecRoundTrip) {
  for (const auto& spec : spec_catalogue()) {
    const auto j = spec_to_json(spec);
    EXPECT_EQ(j.at("model"), std::string(spec.kind()));
    EXPECT_TRUE(spec_from_json(Json::parse(j.dump())) == spec) << j.dump();
  }
  EXPECT_ERRC(spec_from_json(Json{{"model", "nope"}}), Errc::InvalidArgument);
}

TEST(Serialize, Reals) {
  EXPECT_EQ(real_to_json(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isinf(real_from_json(Json("inf"))));
  EXPECT_EQ(real_from_json(real_to_json(0.1)), 0.1);
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Serialize, DistributionRoundTrip) {
  const auto d = islands_distribution(3, 0.4, 0.3);
  EXPECT_TRUE(distribution_from_json(Json::parse(distribution_to_json(d).dump())) == d);
  const auto shorthand = distribution_from_json(Json{{"islands", {{"g", 3}, {"p_s", 0.4}, {"p_d", 0.3}}}});
  EXPECT_TRUE(shorthand == d);
}

TEST(Serialize, RecordShapes) {
  WisdomResult w;
  w.per_size.push_back({5, 0.1, 0.08, 0.2, 0.3, 0.01, 1.0, std::nullopt});
  const auto csv = to_csv(w);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,mean_abs_error,q50,q90,e_max_pi,var_max_pi,convergence_fraction");

  FragmentationReport f;
  f.pi_g_empty = true;
  const auto j = to_json(f);
  for (const char* key : {"p_max", "pi_g_empty", "predicted_rate", "argmax_collection"}) EXPECT_TRUE(j.contains(key));
  EXPECT_EQ(j.at("predicted_rate"), "inf");

  InfluenceEstimate est;
  est.samples = {{0.25, 0.75}, {0.5, 0.5}};
  est.replicas = 2;
  summarize(est);
  const auto icsv = to_csv(est);
  EXPECT_EQ(icsv.substr(0, icsv.find('\n')), "sample,pi_0,pi_1");
}

TEST(Serialize, MatrixRoundTripIsLossless) {
  std::mt19937_64 rng(83);
  for (int k = 0; k < 200; ++k) {
    const auto m = oracle::random_stochastic(rng, 2 + k % 6, 0.3);
    EXPECT_TRUE(matrix_from_json(Json::parse(matrix_to_json(m).dump())) == m);
  }
}

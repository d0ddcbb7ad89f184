#include "degroot/wisdom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "degroot/parallel.hpp"
#include "degroot/random.hpp"

namespace degroot {

void validate_signal(const SignalLaw& law, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) raise(Errc::InvalidArgument, "gamma must lie in [0, 1]");
  if (const auto* u = std::get_if<UniformSignal>(&law)) {
    if (!(u->width > 0.0)) raise(Errc::InvalidArgument, "uniform signal width must be positive");
    // Clipping would move the mean away from gamma.
    if (gamma - u->width < 0.0 || gamma + u->width > 1.0)
      raise(Errc::InvalidArgument, "uniform signal interval leaves [0, 1]");
  } else if (std::holds_alternative<BernoulliSignal>(law)) {
    if (!(gamma > 0.0 && gamma < 1.0)) raise(Errc::InvalidArgument, "Bernoulli signal needs gamma in (0, 1)");
  } else {
    const auto& c = std::get<CustomSignal>(law);
    if (c.values.empty() || c.values.size() != c.probs.size())
      raise(Errc::InvalidArgument, "custom signal needs matching values and probs");
    double total = 0.0, mean = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) {
      if (!(c.values[k] >= 0.0 && c.values[k] <= 1.0)) raise(Errc::InvalidArgument, "signal values must lie in [0, 1]");
      if (!(c.probs[k] >= 0.0)) raise(Errc::InvalidProbability, "signal probabilities must be >= 0");
      total += c.probs[k];
      mean += c.probs[k] * c.values[k];
    }
    if (std::abs(total - 1.0) > 1e-12) raise(Errc::InvalidProbability, "signal probabilities must sum to 1");
    if (std::abs(mean - gamma) > 1e-12) raise(Errc::InvalidArgument, "custom signal mean differs from gamma");
  }
  if (!(signal_variance(law, gamma) > 0.0)) raise(Errc::InvalidArgument, "signal variance must be positive");
}

double signal_variance(const SignalLaw& law, double gamma) {
  if (const auto* u = std::get_if<UniformSignal>(&law)) return u->width * u->width / 3.0;
  if (std::holds_alternative<BernoulliSignal>(law)) return gamma * (1.0 - gamma);
  const auto& c = std::get<CustomSignal>(law);
  double var = 0.0;
  for (std::size_t k = 0; k < c.values.size(); ++k) var += c.probs[k] * (c.values[k] - gamma) * (c.values[k] - gamma);
  return var;
}

double draw_signal(Rng& rng, const SignalLaw& law, double gamma) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (const auto* u = std::get_if<UniformSignal>(&law))
    return std::clamp(gamma - u->width + 2.0 * u->width * unif(rng), 0.0, 1.0);
  if (std::holds_alternative<BernoulliSignal>(law)) return unif(rng) < gamma ? 1.0 : 0.0;
  const auto& c = std::get<CustomSignal>(law);
  const double r = unif(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < c.values.size(); ++k) {
    acc += c.probs[k];
    if (r < acc) return c.values[k];
  }
  return c.values.back();
}

std::vector<double> product_alphas(const std::vector<double>& phi) {
  const std::size_t n = phi.size();
  const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
  std::vector<double> alpha(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) alpha[i * n + j] = phi[i] * phi[j] / total;
  return alpha;
}

std::vector<double> ring_alphas(std::size_t n) {
  return dirichlet_parameters(ring_uniform_self(n));
}

std::vector<double> star_alphas(std::size_t n) {
  std::vector<double> phi(n, 1.0);
  phi[0] = static_cast<double>(n);
  return product_alphas(phi);
}

GeneratorSpec make_family(const Family& family, std::size_t n) {
  if (family.name == "average_or_identity") return average_or_identity(n, family.param);
  if (family.name == "ring_uniform_self") return ring_uniform_self(n);
  if (family.name == "ring_fixed") return fixed(StochasticMatrix::cyclic_shift(n));
  if (family.name == "leader_follower") return leader_follower(n);
  if (family.name == "perturbed_uniform") return perturbed_fixed(StochasticMatrix::uniform(n), family.param);
  if (family.name == "star") return dirichlet_rows(n, star_alphas(n));
  raise(Errc::InvalidArgument, "unknown family '" + family.name + "'");
}

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

WisdomResult run_wisdom(const WisdomConfig& config, std::size_t threads) {
  validate_signal(config.signal, config.gamma);
  if (config.replicas == 0) raise(Errc::InvalidArgument, "replicas must be >= 1");
  WisdomResult result;
  for (std::size_t n : config.sizes) {
    if (n < 2) raise(Errc::InvalidArgument, "society sizes must be >= 2");
    const GeneratorSpec spec = make_family(config.family, n);
    const std::uint64_t size_seed = splitmix64(config.seed + n);
    struct Outcome {
      bool converged = false;
      double error = 0.0;
      double max_pi = 0.0;
    };
    const auto outcomes = map_replicas(config.replicas, threads, [&](std::size_t i) {
      const std::uint64_t s = replica_seed(size_seed, i);
      Rng signal_rng(s);
      std::vector<double> p0(n);
      for (auto& p : p0) p = draw_signal(signal_rng, config.signal, config.gamma);
      Generator gen(spec, splitmix64(s));
      const ProductAccumulator acc = accumulate(gen, config.t_max, config.gap_tol, true);
      Outcome out;
      if (acc.consensus_gap > config.gap_tol) return out;
      const auto pi = acc.product.row(0);
      double consensus = 0.0;
      for (std::size_t j = 0; j < n; ++j) consensus += pi[j] * p0[j];
      out.converged = true;
      out.error = std::abs(consensus - config.gamma);
      out.max_pi = *std::max_element(pi.begin(), pi.end());
      return out;
    });

    SizeResult row;
    row.n = n;
    std::vector<double> errors, maxima;
    for (const auto& o : outcomes)
      if (o.converged) {
        errors.push_back(o.error);
        maxima.push_back(o.max_pi);
      }
    row.convergence_fraction = static_cast<double>(errors.size()) / static_cast<double>(config.replicas);
    if (2 * errors.size() < config.replicas) row.status = Errc::NoConvergence;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (errors.empty()) {
      row.mean_abs_error = row.q50 = row.q90 = row.e_max_pi = row.var_max_pi = nan;
    } else {
      const double k = static_cast<double>(errors.size());
      row.mean_abs_error = std::accumulate(errors.begin(), errors.end(), 0.0) / k;
      row.q50 = quantile(errors, 0.5);
      row.q90 = quantile(errors, 0.9);
      row.e_max_pi = std::accumulate(maxima.begin(), maxima.end(), 0.0) / k;
      double sq = 0.0;
      for (double m : maxima) sq += (m - row.e_max_pi) * (m - row.e_max_pi);
      row.var_max_pi = errors.size() > 1 ? sq / (k - 1.0) : 0.0;
    }
    result.per_size.push_back(row);
  }
  return result;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) raise(Errc::InvalidArgument, "slope fit needs two or more points");
  const double k = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) raise(Errc::InvalidArgument, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

RateFit check_mic3_rates(const std::function<std::vector<double>(std::size_t)>& alpha_family,
                         const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 4) raise(Errc::InvalidArgument, "rate fitting needs at least 4 sizes");
  std::vector<double> log_n, log_total, log_ratio;
  for (std::size_t n : sizes) {
    const auto alpha = alpha_family(n);
    if (!is_balanced(n, alpha)) raise(Errc::BalanceViolation, "alphas for n = " + std::to_string(n) + " are not balanced");
    const auto phi = alpha_row_sums(n, alpha);
    const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_total.push_back(std::log(total));
    log_ratio.push_back(std::log(*std::max_element(phi.begin(), phi.end()) / total));
  }
  RateFit fit;
  fit.k_fit = ls_slope(log_n, log_total);
  fit.m_fit = -ls_slope(log_n, log_ratio);
  fit.qualifies = fit.m_fit > kDecayingRatioSlope;
  return fit;
}

ConjugacyReport dirichlet_conjugacy_test(const GeneratorSpec& spec, std::size_t replicas, std::uint64_t seed,
                                         std::size_t t_max, double gap_tol, std::size_t threads) {
  const auto alpha = dirichlet_parameters(spec);
  if (!is_balanced(spec.n(), alpha)) raise(Errc::BalanceViolation, "Dirichlet parameters are not balanced");
  return dirichlet_conjugacy_test(spec, alpha_row_sums(spec.n(), alpha), replicas, seed, t_max, gap_tol, threads);
}

ConjugacyReport dirichlet_conjugacy_test(const GeneratorSpec& spec, const std::vector<double>& phi,
                                         std::size_t replicas, std::uint64_t seed, std::size_t t_max,
                                         double gap_tol, std::size_t threads) {
  const std::size_t n = spec.n();
  if (phi.size() != n) raise(Errc::DimensionMismatch, "phi length differs from n");
  const InfluenceEstimate est = estimate_influence(spec, replicas, t_max, gap_tol, seed, threads);
  ConjugacyReport rep;
  rep.phi = phi;
  rep.mean = est.mean;
  rep.variance = est.variance;
  const double phi0 = std::accumulate(phi.begin(), phi.end(), 0.0);
  const double k = static_cast<double>(est.samples.size());
  rep.pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = phi[i] / phi0;
    const double v = phi[i] * (phi0 - phi[i]) / (phi0 * phi0 * (phi0 + 1.0));
    rep.expected_mean.push_back(m);
    rep.expected_variance.push_back(v);
    double m4 = 0.0;
    for (const auto& s : est.samples) m4 += std::pow(s[i] - est.mean[i], 4);
    m4 /= k;
    const double se_mean = std::sqrt(v / k);
    const double se_var = std::sqrt(std::max(m4 - est.variance[i] * est.variance[i], 0.0) / k);
    const double dm = std::abs(est.mean[i] - m);
    const double dv = std::abs(est.variance[i] - v);
    rep.mean_err = std::max(rep.mean_err, dm);
    rep.var_err = std::max(rep.var_err, dv);
    if (dm > 4.0 * se_mean || dv > 4.0 * se_var) rep.pass = false;
  }
  return rep;
}

double consensus_probability(std::size_t k, double phi_n) {
  if (k == 0) raise(Errc::InvalidArgument, "k must be >= 1");
  if (!(phi_n >= 0.0 && phi_n <= 1.0)) raise(Errc::InvalidProbability, "phi_n must lie in [0, 1]");
  double total = 0.0;
  double binom = 1.0;  // C(k, j)
  for (std::size_t j = 0; j < k; ++j) {
    total += binom * std::pow(1.0 - phi_n, static_cast<double>(j)) * std::pow(phi_n, static_cast<double>(k - j));
    binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
  }
  return total;
}

MeanRankOne mean_rank_one_test(const GeneratorSpec& spec, std::size_t replicas, std::size_t t_max,
                               std::uint64_t seed, bool allow_no_positive, std::size_t threads) {
  if (replicas == 0) raise(Errc::InvalidArgument, "replicas must be >= 1");
  const std::size_t n = spec.n();
  struct Outcome {
    std::vector<double> entries;
    bool positive = false;
  };
  const auto outcomes = map_replicas(replicas, threads, [&](std::size_t i) {
    Generator gen(spec, replica_seed(seed, i));
    const ProductAccumulator acc = accumulate(gen, t_max, -1.0);
    return Outcome{acc.product.entries(), acc.strict_positive_seen};
  });
  std::vector<double> mean(n * n, 0.0);
  std::size_t positive = 0;
  for (const auto& o : outcomes) {
    for (std::size_t e = 0; e < n * n; ++e) mean[e] += o.entries[e];
    positive += o.positive ? 1 : 0;
  }
  if (positive == 0 && !allow_no_positive)
    raise(Errc::PreconditionUnmet, "no strictly positive product observed");
  for (auto& m : mean) m /= static_cast<double>(replicas);
  MeanRankOne out;
  out.mean_limit = StochasticMatrix::adopt(n, std::move(mean));
  out.tol_used = std::max(kRankRelTol, 5.0 / std::sqrt(static_cast<double>(replicas)));
  out.rank = numeric_rank(out.mean_limit, out.tol_used).numeric_rank;
  out.strict_positive_fraction = static_cast<double>(positive) / static_cast<double>(replicas);
  return out;
}

}  // namespace degroot

#include "degroot/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "degroot/engine.hpp"
#include "degroot/error.hpp"
#include "degroot/fragmentation.hpp"
#include "degroot/generators.hpp"
#include "degroot/serialize.hpp"
#include "degroot/wisdom.hpp"

namespace degroot::cli {
namespace {

const std::vector<std::pair<std::string, std::string>> kCommands{
    {"simulate", "belief trajectory from --p0"},
    {"influence", "Monte Carlo samples of the influence vector"},
    {"wisdom", "aggregation error across society sizes"},
    {"speed2x2", "time to reach a spread of --phi for 2x2 models"},
    {"energy", "log-energy of a 2x2 weight law"},
    {"pmax", "heaviest disconnected collection of a graph law"},
    {"rate", "empirical decay rate of the consensus gap"},
    {"disagree", "rank of the limiting product"},
    {"check-c", "whether products eventually become strictly positive"},
    {"skeleton", "compare the verdicts of two models sharing a skeleton"},
    {"semigroup", "products generated by a finite support"},
    {"conjugacy", "influence moments against the Dirichlet prediction"}};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::size_t n = 3;
  double eps = 0.5;
  double pmeet = 0.5;
  double alpha = 1.0;
  double a = 0.5;
  double b = 1.0;
  double x = 0.5;
  double pa = 0.5;
  double pb = 0.5;
  std::size_t g = 2;
  double ps = 1.0;
  double pd = 0.5;
  double zeta = 0.5;
  double kappa = 0.3;
  double r = 0.5;
  double q = 0.3;
  double xi = 0.5;
  double self = 0.95;
};

struct Flags {
  std::string config;
  std::string model;
  std::string model_b;
  std::string mu;
  std::string dist;
  ModelFlags m;
  ExperimentConfig c;
  // wisdom
  std::string family = "ring_uniform_self";
  double family_param = 0.0;
  std::vector<std::size_t> sizes{5, 10, 20, 40};
  double gamma = 0.5;
  std::string signal = "uniform";
  double width = 0.25;
};

StochasticMatrix sticky_ring(std::size_t n, double self) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    rows[i][i] += self;
    rows[i][(i + 1) % n] += 1.0 - self;
  }
  return make_stochastic(rows);
}

GeneratorSpec mu_model(const std::string& mu) {
  if (mu == "uniform-indep") return independent_weights_2x2(1.0, 1.0);
  if (mu == "arcsine-indep") return independent_weights_2x2(0.5, 0.5);
  if (mu == "beta2-indep") return independent_weights_2x2(2.0, 2.0);
  if (mu == "beta5-indep") return independent_weights_2x2(5.0, 5.0);
  throw UsageError("--mu: unknown law '" + mu + "'");
}

GeneratorSpec named_model(const std::string& name, const ModelFlags& f) {
  if (name == "encounter2x2") return encounter_2x2(f.eps, f.pmeet);
  if (name == "beta2x2") return beta_weights_2x2(f.alpha);
  if (name == "indep2x2") return independent_weights_2x2(f.a, f.b);
  if (name == "dirichlet2x2") return dirichlet_rows(2, std::vector<double>(4, f.alpha));
  if (name == "ring") return ring_uniform_self(f.n);
  if (name == "ring-fixed") return fixed(StochasticMatrix::cyclic_shift(f.n));
  if (name == "leader") return leader_follower(f.n);
  if (name == "perturbed-uniform") return perturbed_fixed(StochasticMatrix::uniform(f.n), f.eps);
  if (name == "swap") return two_point_swap(f.a);
  if (name == "bernoulli2x2") return bernoulli_2x2(f.x, f.pa, f.pb);
  if (name == "islands") return islands_graphs(f.g, f.ps, f.pd);
  if (name == "average-identity") return average_or_identity(f.n, f.zeta);
  if (name == "stubborn") return stubborn_third_mixture(f.kappa, f.r);
  if (name == "comp-random") return random_upper_2x2();
  if (name == "comp-fixed") return fixed(make_stochastic({{0.5, 0.5}, {0.0, 1.0}}));
  if (name == "two-block") return two_block_decay_model(f.n, f.q);
  if (name == "ar1") return ar1_mixture(f.xi, sticky_ring(f.n, f.self), ring_uniform_self(f.n));
  throw UsageError("--model: unknown model '" + name + "'");
}

SignalLaw signal_law(const std::string& name, double width) {
  if (name == "uniform") return UniformSignal{width};
  if (name == "bernoulli") return BernoulliSignal{};
  throw UsageError("--signal: unknown law '" + name + "'");
}

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--out", f.c.output, "output file (default: stdout)");
  sub->add_option("--format", f.c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", f.c.seed, "master seed");
  sub->add_option("--threads", f.c.threads, "worker threads (0: DEGROOT_THREADS or hardware)");

  sub->add_option("--model", f.model, "named model");
  sub->add_option("--model-b", f.model_b, "second named model (skeleton)");
  sub->add_option("--mu", f.mu, "2x2 weight law: uniform-indep, arcsine-indep, beta2-indep, beta5-indep");
  sub->add_option("--dist", f.dist, "graph distribution JSON file");

  sub->add_option("--n", f.m.n, "number of agents");
  sub->add_option("--eps", f.m.eps, "encounter weight or perturbation concentration");
  sub->add_option("--pmeet", f.m.pmeet, "meeting probability");
  sub->add_option("--alpha", f.m.alpha, "Beta/Dirichlet parameter");
  sub->add_option("--a", f.m.a, "swap: identity probability; indep2x2: first Beta parameter");
  sub->add_option("--b", f.m.b, "indep2x2: second Beta parameter");
  sub->add_option("--x", f.m.x, "bernoulli2x2 weight");
  sub->add_option("--pa", f.m.pa, "bernoulli2x2 probability for agent 1");
  sub->add_option("--pb", f.m.pb, "bernoulli2x2 probability for agent 2");
  sub->add_option("--g", f.m.g, "agents per island");
  sub->add_option("--ps", f.m.ps, "within-island link probability");
  sub->add_option("--pd", f.m.pd, "cross-island link probability");
  sub->add_option("--zeta", f.m.zeta, "probability of the averaging matrix");
  sub->add_option("--kappa", f.m.kappa, "stubborn model weight");
  sub->add_option("--r", f.m.r, "stubborn model mixing probability");
  sub->add_option("--q", f.m.q, "two-block split probability");
  sub->add_option("--xi", f.m.xi, "AR(1) innovation weight");
  sub->add_option("--self", f.m.self, "AR(1) start matrix self-weight");

  sub->add_option("--p0", f.c.p0, "initial beliefs");
  sub->add_option("--replicas", f.c.replicas, "Monte Carlo replicas");
  sub->add_option("--t-max", f.c.t_max, "product horizon");
  sub->add_option("--gap-tol", f.c.gap_tol, "consensus gap tolerance");
  sub->add_option("--horizon", f.c.horizon, "steps (simulate) or search horizon (check-c)");
  sub->add_option("--phi", f.c.phi, "convergence threshold");
  sub->add_option("--t-cap", f.c.t_cap, "per-replica cap on t_phi (0: default)");
  sub->add_option("--quad-points", f.c.quad_points, "quadrature nodes");
  sub->add_option("--epsilon", f.c.epsilon, "gap threshold for decay rates");
  sub->add_option("--t-grid", f.c.t_grid, "times at which exceedances are counted");
  sub->add_option("--atom-tol", f.c.atom_tol, "clustering tolerance for limit atoms");
  sub->add_option("--max-len", f.c.max_len, "longest product explored");
  sub->add_option("--dedup-tol", f.c.dedup_tol, "duplicate tolerance for semigroup elements");
  sub->add_flag("--allow-no-positive", f.c.allow_no_positive, "skip the strict-positivity precondition");

  sub->add_option("--family", f.family, "wisdom family");
  sub->add_option("--family-param", f.family_param, "wisdom family parameter");
  sub->add_option("--sizes", f.sizes, "wisdom society sizes");
  sub->add_option("--gamma", f.gamma, "true state");
  sub->add_option("--signal", f.signal, "uniform or bernoulli");
  sub->add_option("--width", f.width, "uniform signal half-width");
}

bool given(const CLI::App* sub, const char* name) { return sub->count(name) > 0; }

/// Starts from --config (if any) and overlays the flags given explicitly.
ExperimentConfig assemble(const CLI::App* sub, Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    try {
      c = config_from_json(Json::parse(read_text(f.config)));
    } catch (const Json::exception& e) {
      throw UsageError(std::string("--config: ") + e.what());
    } catch (const Error& e) {
      throw UsageError(std::string("--config: ") + e.what());
    }
  }
  c.command = sub->get_name();
#define OVERLAY(flag, field) \
  if (given(sub, flag)) c.field = f.c.field
  OVERLAY("--out", output);
  OVERLAY("--format", format);
  OVERLAY("--seed", seed);
  OVERLAY("--threads", threads);
  OVERLAY("--p0", p0);
  OVERLAY("--replicas", replicas);
  OVERLAY("--t-max", t_max);
  OVERLAY("--gap-tol", gap_tol);
  OVERLAY("--horizon", horizon);
  OVERLAY("--phi", phi);
  OVERLAY("--t-cap", t_cap);
  OVERLAY("--quad-points", quad_points);
  OVERLAY("--epsilon", epsilon);
  OVERLAY("--t-grid", t_grid);
  OVERLAY("--atom-tol", atom_tol);
  OVERLAY("--max-len", max_len);
  OVERLAY("--dedup-tol", dedup_tol);
  OVERLAY("--allow-no-positive", allow_no_positive);
#undef OVERLAY

  auto build = [&](const char* flag, const std::string& name) {
    try {
      return named_model(name, f.m);
    } catch (const Error& e) {
      throw UsageError(std::string(flag) + " " + name + ": " + e.what());
    }
  };
  if (!f.mu.empty()) c.model = mu_model(f.mu);
  if (!f.model.empty()) c.model = build("--model", f.model);
  if (!f.model_b.empty()) c.model_b = build("--model-b", f.model_b);
  if (!f.dist.empty()) {
    try {
      c.dist = distribution_from_json(Json::parse(read_text(f.dist)));
    } catch (const Json::exception& e) {
      throw UsageError(std::string("--dist: ") + e.what());
    } catch (const Error& e) {
      throw UsageError(std::string("--dist: ") + e.what());
    }
  }
  if (c.command == "wisdom" && (!c.wisdom || given(sub, "--family") || given(sub, "--sizes"))) {
    WisdomConfig w = c.wisdom.value_or(WisdomConfig{});
    if (!c.wisdom) {
      w.replicas = c.replicas;
      w.t_max = c.t_max;
      w.gap_tol = c.gap_tol;
      w.seed = c.seed;
    }
    w.family = Family{f.family, f.family_param};
    w.sizes = f.sizes;
    w.gamma = f.gamma;
    w.signal = signal_law(f.signal, f.width);
    c.wisdom = w;
  }
  if (c.wisdom) {
    if (given(sub, "--replicas")) c.wisdom->replicas = c.replicas;
    if (given(sub, "--t-max")) c.wisdom->t_max = c.t_max;
    if (given(sub, "--gap-tol")) c.wisdom->gap_tol = c.gap_tol;
    if (given(sub, "--seed")) c.wisdom->seed = c.seed;
  }
  return c;
}

const GeneratorSpec& need_model(const ExperimentConfig& c) {
  if (!c.model) throw UsageError("--model: a model is required for '" + c.command + "'");
  return *c.model;
}

struct Output {
  std::string text;
  std::string summary;
  bool no_convergence = false;
};

template <typename Report>
std::string render(const ExperimentConfig& c, const Report& r) {
  return c.format == "json" ? to_json(r).dump(2) + "\n" : to_csv(r);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string fmt_vec(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

Output execute(const ExperimentConfig& c) {
  const auto& cmd = c.command;
  if (cmd == "simulate") {
    const auto& spec = need_model(c);
    std::vector<double> p0 = c.p0;
    if (p0.empty()) {
      for (std::size_t i = 0; i < spec.n(); ++i)
        p0.push_back(spec.n() == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(spec.n() - 1));
    }
    if (p0.size() != spec.n()) throw UsageError("--p0: expected " + std::to_string(spec.n()) + " beliefs");
    for (double v : p0)
      if (!(v >= 0.0 && v <= 1.0)) throw UsageError("--p0: beliefs must lie in [0, 1]");
    Generator gen(spec, replica_seed(c.seed, 0));
    std::vector<BeliefState> path{BeliefState::from_signals(p0)};
    for (std::size_t t = 0; t < c.horizon; ++t) path.push_back(evolve(gen, path.back(), 1));
    const auto& last = path.back().p;
    const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
    return {c.format == "json" ? trajectory_to_json(path).dump(2) + "\n" : trajectory_to_csv(path),
            "simulate: " + std::to_string(c.horizon) + " steps, final belief range " + fmt(*hi - *lo)};
  }
  if (cmd == "influence") {
    const auto r = estimate_influence(need_model(c), c.replicas, c.t_max, c.gap_tol, c.seed, c.threads);
    return {render(c, r), "influence: mean pi " + fmt_vec(r.mean) + ", E[max pi] " + fmt(r.max_component_mean) +
                              ", converged " + fmt(r.convergence_fraction())};
  }
  if (cmd == "wisdom") {
    const auto r = run_wisdom(*c.wisdom, c.threads);
    bool failed = false;
    std::string s = "wisdom " + c.wisdom->family.name + ": E[max pi]";
    for (const auto& row : r.per_size) {
      s += " n=" + std::to_string(row.n) + ":" + fmt(row.e_max_pi);
      failed = failed || row.status.has_value();
    }
    return {render(c, r), s, failed};
  }
  if (cmd == "speed2x2") {
    const std::size_t cap = c.t_cap == 0 ? default_t_cap(c.phi) : c.t_cap;
    const auto r = convergence_time_2x2(need_model(c), c.phi, c.replicas, cap, c.seed, c.threads);
    return {render(c, r), "speed2x2: mean t_phi " + fmt(r.mean_t_phi) + " (-log phi / mean t_phi = " +
                              fmt(-std::log(c.phi) / r.mean_t_phi) + ", cap hits " + std::to_string(r.cap_hits) +
                              ")"};
  }
  if (cmd == "energy") {
    const double e = log_energy(law_2x2(need_model(c)), c.quad_points);
    const std::string text = c.format == "json" ? Json{{"log_energy", real_to_json(e)}}.dump(2) + "\n"
                                                : "log_energy\n" + format_double(e) + "\n";
    return {text, "energy: I = " + fmt(e) + ", predicted mean t_phi " + fmt(-std::log(c.phi) / e)};
  }
  if (cmd == "pmax") {
    GraphDistribution dist;
    if (c.dist) {
      dist = *c.dist;
    } else if (c.model) {
      dist = graph_distribution(*c.model);
    } else {
      throw UsageError("--dist: a graph distribution (or --model) is required for 'pmax'");
    }
    const auto r = p_max(dist);
    return {render(c, r), "pmax: p_max = " + format_double(r.p_max) + ", predicted rate " + fmt(r.predicted_rate)};
  }
  if (cmd == "rate") {
    std::vector<std::size_t> grid = c.t_grid;
    if (grid.empty()) grid = {5, 10, 15, 20, 25, 30, 35, 40};
    const auto r = decay_rate_estimate(need_model(c), c.epsilon, grid, c.replicas, c.seed, c.threads);
    return {render(c, r), "rate: empirical decay rate " + fmt(r.empirical_rate) + " from " +
                              std::to_string(r.points_used) + " points"};
  }
  if (cmd == "disagree") {
    const auto r = disagreement_degree(need_model(c), c.replicas, c.t_max, c.atom_tol, c.seed, c.threads);
    return {render(c, r), "disagree: eta = " + std::to_string(r.eta_estimate) + ", " +
                              std::to_string(r.support_atoms.size()) + " limit atoms"};
  }
  if (cmd == "check-c") {
    const auto r = check_condition_c(need_model(c), c.horizon, c.replicas, c.seed, c.threads);
    return {render(c, r), "check-c: " + std::string(to_string(r.verdict)) + " via " + std::string(to_string(r.method))};
  }
  if (cmd == "skeleton") {
    if (!c.model_b) throw UsageError("--model-b: a second model is required for 'skeleton'");
    const auto r = skeleton_equivalence_test(need_model(c), *c.model_b, c.horizon, c.replicas, c.seed, c.threads);
    return {render(c, r), std::string("skeleton: same initial skeleton ") + (r.same_initial_skeleton ? "yes" : "no") +
                              ", verdicts " + std::string(to_string(r.verdict_a.verdict)) + "/" +
                              std::string(to_string(r.verdict_b.verdict)) + (r.agree ? " agree" : " differ")};
  }
  if (cmd == "semigroup") {
    const auto sup = support(need_model(c));
    if (sup.kind != SupportDescriptor::Kind::Finite)
      throw UsageError("--model: 'semigroup' needs a finite-support model");
    const auto r = semigroup_explore(sup.atoms, c.max_len, c.dedup_tol);
    return {render(c, r), "semigroup: " + std::to_string(r.elements) + " elements, min rank " +
                              std::to_string(r.min_rank) + (r.closed ? ", closed" : ", open")};
  }
  if (cmd == "conjugacy") {
    const auto r = dirichlet_conjugacy_test(need_model(c), c.replicas, c.seed, c.t_max, c.gap_tol, c.threads);
    return {render(c, r), "conjugacy: phi " + fmt_vec(r.phi) + (r.pass ? ", moments match" : ", moments differ")};
  }
  throw UsageError("unknown subcommand '" + cmd + "'");
}

bool no_convergence_class(Errc code) {
  switch (code) {
    case Errc::NoConvergence:
    case Errc::CapHit:
    case Errc::InsufficientEvents:
    case Errc::PreconditionUnmet:
    case Errc::SingularMass:
    case Errc::ExplosionGuard:
      return true;
    default:
      return false;
  }
}

bool usage_class(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::InvalidProbability:
    case Errc::DimensionMismatch:
    case Errc::NegativeEntry:
    case Errc::RowSumViolation:
    case Errc::Unsupported:
    case Errc::NotIid:
    case Errc::SizeLimit:
    case Errc::BalanceViolation:
    case Errc::NotStrictlyPositive:
      return true;
    default:
      return false;
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Simulate belief averaging on random interaction networks"};
  app.require_subcommand(1);
  Flags flags;
  for (const auto& [name, about] : kCommands) add_flags(app.add_subcommand(name, about), flags);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  const CLI::App* sub = app.get_subcommands().front();

  try {
    const ExperimentConfig config = assemble(sub, flags);
    const Output out = execute(config);
    emit(out.text, config.output);
    std::cerr << out.summary << "\n";
    return out.no_convergence ? kExitNoConvergence : kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    if (no_convergence_class(e.code())) return kExitNoConvergence;
    if (usage_class(e.code())) return kExitUsage;
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace degroot::cli

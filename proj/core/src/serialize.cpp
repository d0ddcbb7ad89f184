#include "degroot/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "degroot/error.hpp"

namespace degroot {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json real_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  raise(Errc::InvalidArgument, "expected a number, got " + j.dump());
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) raise(Errc::InvalidArgument, std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::InvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

std::vector<StochasticMatrix> matrices_from_json(const Json& j) {
  std::vector<StochasticMatrix> out;
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

Json matrices_to_json(const std::vector<StochasticMatrix>& ms) {
  Json arr = Json::array();
  for (const auto& m : ms) arr.push_back(matrix_to_json(m));
  return arr;
}

Json graph_to_json(const Graph& g) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < g.size(); ++j) row.push_back(g.has_edge(i, j) ? 1 : 0);
    rows.push_back(row);
  }
  return rows;
}

Graph graph_from_json(const Json& j) {
  const std::size_t n = j.size();
  std::vector<std::uint8_t> bits;
  for (const auto& row : j) {
    if (row.size() != n) raise(Errc::DimensionMismatch, "adjacency must be square");
    for (const auto& v : row) bits.push_back(v.get<int>() != 0 ? 1 : 0);
  }
  return {n, std::move(bits)};
}

std::string join_header(const std::string& prefix, std::size_t n) {
  std::string h = prefix;
  for (std::size_t i = 0; i < n; ++i) h += ",pi_" + std::to_string(i);
  return h;
}

}  // namespace

Json matrix_to_json(const StochasticMatrix& m) { return m.to_rows(); }

StochasticMatrix matrix_from_json(const Json& j) {
  try {
    return make_stochastic(j.get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::InvalidArgument, std::string("matrix: ") + e.what());
  }
}

Json mask_to_json(const SkeletonMask& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m(i, j) ? 1 : 0);
    rows.push_back(row);
  }
  return rows;
}

SkeletonMask mask_from_json(const Json& j) {
  const std::size_t n = j.size();
  std::vector<std::uint8_t> bits;
  for (const auto& row : j) {
    if (row.size() != n) raise(Errc::DimensionMismatch, "mask must be square");
    for (const auto& v : row) bits.push_back(v.get<int>() != 0 ? 1 : 0);
  }
  return {n, std::move(bits)};
}

Json spec_to_json(const GeneratorSpec& spec) {
  struct Encode {
    Json operator()(const Fixed& m) const { return {{"matrix", matrix_to_json(m.matrix)}}; }
    Json operator()(const FiniteMixture& m) const {
      Json j{{"atoms", matrices_to_json(m.atoms)}, {"probs", m.probs}};
      if (!m.transition.empty()) j["transition"] = m.transition;
      return j;
    }
    Json operator()(const DirichletRows& m) const {
      Json rows = Json::array();
      for (std::size_t i = 0; i < m.n; ++i)
        rows.push_back(std::vector<double>(m.alpha.begin() + static_cast<std::ptrdiff_t>(i * m.n),
                                           m.alpha.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.n)));
      return {{"alpha", rows}};
    }
    Json operator()(const PerturbedFixed& m) const {
      return {{"base", matrix_to_json(m.base)}, {"influence", m.influence}, {"epsilon", m.epsilon}};
    }
    Json operator()(const LeaderFollower& m) const { return {{"n", m.n}}; }
    Json operator()(const Encounter2x2& m) const { return {{"epsilon", m.epsilon}, {"p_meet", m.p_meet}}; }
    Json operator()(const Bernoulli2x2& m) const { return {{"x", m.x}, {"p_a", m.p_a}, {"p_b", m.p_b}}; }
    Json operator()(const TwoPointSwap& m) const { return {{"a", m.a}}; }
    Json operator()(const Islands& m) const { return {{"g", m.g}, {"p_s", m.p_s}, {"p_d", m.p_d}}; }
    Json operator()(const UndirectedDegree& m) const {
      Json graphs = Json::array();
      for (const auto& g : m.graphs) graphs.push_back(mask_to_json(g));
      return {{"graphs", graphs}, {"probs", m.probs}};
    }
    Json operator()(const Ar1Mixture& m) const {
      return {{"xi", m.xi}, {"start", matrix_to_json(m.start)}, {"source", spec_to_json(*m.source)}};
    }
  };
  Json j = std::visit(Encode{}, spec.model());
  j["model"] = std::string(spec.kind());
  return j;
}

GeneratorSpec spec_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "model");
  try {
    if (kind == "fixed") return fixed(matrix_from_json(field(j, "matrix")));
    if (kind == "mixture") {
      return GeneratorSpec(FiniteMixture{matrices_from_json(field(j, "atoms")), get<std::vector<double>>(j, "probs"),
                                         get_or<std::vector<std::vector<double>>>(j, "transition", {})});
    }
    if (kind == "dirichlet_rows") {
      const auto rows = get<std::vector<std::vector<double>>>(j, "alpha");
      std::vector<double> flat;
      for (const auto& r : rows) {
        if (r.size() != rows.size()) raise(Errc::DimensionMismatch, "alpha must be square");
        flat.insert(flat.end(), r.begin(), r.end());
      }
      return dirichlet_rows(rows.size(), std::move(flat));
    }
    if (kind == "perturbed_fixed") {
      const StochasticMatrix base = matrix_from_json(field(j, "base"));
      const double eps = get<double>(j, "epsilon");
      if (j.contains("influence"))
        return GeneratorSpec(PerturbedFixed{base, get<std::vector<double>>(j, "influence"), eps});
      return perturbed_fixed(base, eps);
    }
    if (kind == "leader_follower") return leader_follower(get<std::size_t>(j, "n"));
    if (kind == "encounter_2x2") return encounter_2x2(get<double>(j, "epsilon"), get<double>(j, "p_meet"));
    if (kind == "bernoulli_2x2") return bernoulli_2x2(get<double>(j, "x"), get<double>(j, "p_a"), get<double>(j, "p_b"));
    if (kind == "two_point_swap") return two_point_swap(get<double>(j, "a"));
    if (kind == "islands") return islands_graphs(get<std::size_t>(j, "g"), get<double>(j, "p_s"), get<double>(j, "p_d"));
    if (kind == "undirected_degree") {
      std::vector<SkeletonMask> graphs;
      for (const auto& g : field(j, "graphs")) graphs.push_back(mask_from_json(g));
      return undirected_degree(std::move(graphs), get<std::vector<double>>(j, "probs"));
    }
    if (kind == "ar1_mixture")
      return ar1_mixture(get<double>(j, "xi"), matrix_from_json(field(j, "start")), spec_from_json(field(j, "source")));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::InvalidArgument, "model '" + kind + "': " + e.what());
  }
  raise(Errc::InvalidArgument, "unknown model '" + kind + "'");
}

Json distribution_to_json(const GraphDistribution& dist) {
  Json atoms = Json::array();
  for (const auto& [g, p] : dist.atoms()) atoms.push_back({{"adjacency", graph_to_json(g)}, {"prob", p}});
  return {{"atoms", atoms}};
}

GraphDistribution distribution_from_json(const Json& j) {
  if (j.contains("islands")) {
    const Json& isl = j.at("islands");
    return islands_distribution(get<std::size_t>(isl, "g"), get<double>(isl, "p_s"), get<double>(isl, "p_d"));
  }
  std::vector<std::pair<Graph, double>> atoms;
  for (const auto& a : field(j, "atoms")) atoms.emplace_back(graph_from_json(field(a, "adjacency")), get<double>(a, "prob"));
  return GraphDistribution(std::move(atoms));
}

Json wisdom_config_to_json(const WisdomConfig& c) {
  Json signal;
  if (const auto* u = std::get_if<UniformSignal>(&c.signal)) {
    signal = {{"law", "uniform"}, {"width", u->width}};
  } else if (std::holds_alternative<BernoulliSignal>(c.signal)) {
    signal = {{"law", "bernoulli"}};
  } else {
    const auto& cs = std::get<CustomSignal>(c.signal);
    signal = {{"law", "custom"}, {"values", cs.values}, {"probs", cs.probs}};
  }
  return {{"family", c.family.name}, {"param", c.family.param}, {"sizes", c.sizes},     {"gamma", c.gamma},
          {"signal", signal},        {"replicas", c.replicas},  {"t_max", c.t_max},     {"gap_tol", c.gap_tol},
          {"seed", c.seed}};
}

WisdomConfig wisdom_config_from_json(const Json& j) {
  WisdomConfig c;
  c.family.name = get_or<std::string>(j, "family", c.family.name);
  c.family.param = get_or<double>(j, "param", c.family.param);
  c.sizes = get_or<std::vector<std::size_t>>(j, "sizes", c.sizes);
  c.gamma = get_or<double>(j, "gamma", c.gamma);
  c.replicas = get_or<std::size_t>(j, "replicas", c.replicas);
  c.t_max = get_or<std::size_t>(j, "t_max", c.t_max);
  c.gap_tol = get_or<double>(j, "gap_tol", c.gap_tol);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("signal")) {
    const Json& s = j.at("signal");
    const auto law = get<std::string>(s, "law");
    if (law == "uniform") {
      c.signal = UniformSignal{get_or<double>(s, "width", 0.25)};
    } else if (law == "bernoulli") {
      c.signal = BernoulliSignal{};
    } else if (law == "custom") {
      c.signal = CustomSignal{get<std::vector<double>>(s, "values"), get<std::vector<double>>(s, "probs")};
    } else {
      raise(Errc::InvalidArgument, "unknown signal law '" + law + "'");
    }
  }
  return c;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j{{"command", c.command},   {"seed", c.seed},         {"output", c.output},
         {"format", c.format},     {"threads", c.threads},   {"p0", c.p0},
         {"replicas", c.replicas}, {"t_max", c.t_max},       {"gap_tol", c.gap_tol},
         {"horizon", c.horizon},   {"phi", c.phi},           {"t_cap", c.t_cap},
         {"quad_points", c.quad_points}, {"epsilon", c.epsilon}, {"t_grid", c.t_grid},
         {"atom_tol", c.atom_tol}, {"max_len", c.max_len},   {"dedup_tol", c.dedup_tol},
         {"allow_no_positive", c.allow_no_positive}};
  if (c.model) j["model"] = spec_to_json(*c.model);
  if (c.model_b) j["model_b"] = spec_to_json(*c.model_b);
  if (c.dist) j["dist"] = distribution_to_json(*c.dist);
  if (c.wisdom) j["wisdom"] = wisdom_config_to_json(*c.wisdom);
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) raise(Errc::InvalidArgument, "config must be a JSON object");
  ExperimentConfig c;
  c.command = get_or<std::string>(j, "command", c.command);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.output = get_or<std::string>(j, "output", c.output);
  c.format = get_or<std::string>(j, "format", c.format);
  c.threads = get_or<std::size_t>(j, "threads", c.threads);
  c.p0 = get_or<std::vector<double>>(j, "p0", c.p0);
  c.replicas = get_or<std::size_t>(j, "replicas", c.replicas);
  c.t_max = get_or<std::size_t>(j, "t_max", c.t_max);
  c.gap_tol = get_or<double>(j, "gap_tol", c.gap_tol);
  c.horizon = get_or<std::size_t>(j, "horizon", c.horizon);
  c.phi = get_or<double>(j, "phi", c.phi);
  c.t_cap = get_or<std::size_t>(j, "t_cap", c.t_cap);
  c.quad_points = get_or<std::size_t>(j, "quad_points", c.quad_points);
  c.epsilon = get_or<double>(j, "epsilon", c.epsilon);
  c.t_grid = get_or<std::vector<std::size_t>>(j, "t_grid", c.t_grid);
  c.atom_tol = get_or<double>(j, "atom_tol", c.atom_tol);
  c.max_len = get_or<std::size_t>(j, "max_len", c.max_len);
  c.dedup_tol = get_or<double>(j, "dedup_tol", c.dedup_tol);
  c.allow_no_positive = get_or<bool>(j, "allow_no_positive", c.allow_no_positive);
  if (j.contains("model")) c.model = spec_from_json(j.at("model"));
  if (j.contains("model_b")) c.model_b = spec_from_json(j.at("model_b"));
  if (j.contains("dist")) c.dist = distribution_from_json(j.at("dist"));
  if (j.contains("wisdom")) c.wisdom = wisdom_config_from_json(j.at("wisdom"));
  return c;
}

Json to_json(const InfluenceEstimate& r) {
  Json mean = Json::array(), var = Json::array();
  for (double v : r.mean) mean.push_back(real_to_json(v));
  for (double v : r.variance) var.push_back(real_to_json(v));
  return {{"replicas", r.replicas},
          {"failures", r.failures},
          {"mean", mean},
          {"variance", var},
          {"max_component_mean", real_to_json(r.max_component_mean)},
          {"max_component_variance", real_to_json(r.max_component_variance)},
          {"samples", r.samples}};
}

std::string to_csv(const InfluenceEstimate& r) {
  std::ostringstream os;
  const std::size_t n = r.samples.empty() ? r.mean.size() : r.samples.front().size();
  os << join_header("sample", n) << '\n';
  for (std::size_t k = 0; k < r.samples.size(); ++k) {
    os << k;
    for (double v : r.samples[k]) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

Json to_json(const WisdomResult& r) {
  Json rows = Json::array();
  for (const auto& s : r.per_size) {
    Json row{{"n", s.n},
             {"mean_abs_error", real_to_json(s.mean_abs_error)},
             {"q50", real_to_json(s.q50)},
             {"q90", real_to_json(s.q90)},
             {"e_max_pi", real_to_json(s.e_max_pi)},
             {"var_max_pi", real_to_json(s.var_max_pi)},
             {"convergence_fraction", real_to_json(s.convergence_fraction)}};
    row["status"] = s.status ? std::string(to_string(*s.status)) : std::string("ok");
    rows.push_back(row);
  }
  return {{"per_size", rows}};
}

std::string to_csv(const WisdomResult& r) {
  std::ostringstream os;
  os << "n,mean_abs_error,q50,q90,e_max_pi,var_max_pi,convergence_fraction\n";
  for (const auto& s : r.per_size) {
    os << s.n << ',' << format_double(s.mean_abs_error) << ',' << format_double(s.q50) << ','
       << format_double(s.q90) << ',' << format_double(s.e_max_pi) << ',' << format_double(s.var_max_pi) << ','
       << format_double(s.convergence_fraction) << '\n';
  }
  return os.str();
}

Json to_json(const FragmentationReport& r) {
  Json coll = Json::array();
  for (const auto& g : r.argmax_collection) coll.push_back(graph_to_json(g));
  return {{"p_max", real_to_json(r.p_max)},
          {"pi_g_empty", r.pi_g_empty},
          {"predicted_rate", real_to_json(r.predicted_rate)},
          {"argmax_collection", coll}};
}

std::string to_csv(const FragmentationReport& r) {
  return "p_max,pi_g_empty,predicted_rate,collection_size\n" + format_double(r.p_max) + ',' +
         (r.pi_g_empty ? "true" : "false") + ',' + format_double(r.predicted_rate) + ',' +
         std::to_string(r.argmax_collection.size()) + '\n';
}

Json to_json(const ConvergenceTimeReport& r) {
  return {{"mean_t_phi", real_to_json(r.mean_t_phi)}, {"cap_hits", r.cap_hits}, {"samples", r.samples}};
}

std::string to_csv(const ConvergenceTimeReport& r) {
  std::ostringstream os;
  os << "replica,t_phi\n";
  for (std::size_t k = 0; k < r.samples.size(); ++k) os << k << ',' << r.samples[k] << '\n';
  return os.str();
}

Json to_json(const DisagreementReport& r) {
  Json hist = Json::array();
  for (const auto& [rank, f] : r.rank_histogram) hist.push_back({{"rank", rank}, {"frequency", f}});
  Json atoms = Json::array();
  for (const auto& [m, f] : r.support_atoms) atoms.push_back({{"matrix", matrix_to_json(m)}, {"frequency", f}});
  return {{"eta_estimate", r.eta_estimate}, {"rank_histogram", hist}, {"support_atoms", atoms}};
}

std::string to_csv(const DisagreementReport& r) {
  std::ostringstream os;
  os << "rank,frequency\n";
  for (const auto& [rank, f] : r.rank_histogram) os << rank << ',' << format_double(f) << '\n';
  return os.str();
}

Json to_json(const ConditionCReport& r) {
  return {{"verdict", std::string(to_string(r.verdict))},
          {"method", std::string(to_string(r.method))},
          {"evidence", real_to_json(r.evidence)},
          {"horizon", r.horizon}};
}

std::string to_csv(const ConditionCReport& r) {
  return "verdict,method,evidence,horizon\n" + std::string(to_string(r.verdict)) + ',' +
         std::string(to_string(r.method)) + ',' + format_double(r.evidence) + ',' + std::to_string(r.horizon) + '\n';
}

Json to_json(const SemigroupReport& r) {
  Json masks = Json::array();
  for (const auto& m : r.skeletons) masks.push_back(mask_to_json(m));
  return {{"skeletons", masks},
          {"min_rank", r.min_rank},
          {"rank_one_atoms", matrices_to_json(r.rank_one_atoms)},
          {"elements", r.elements},
          {"depth", r.depth},
          {"closed", r.closed}};
}

std::string to_csv(const SemigroupReport& r) {
  return "elements,depth,closed,min_rank,rank_one_atoms,skeletons\n" + std::to_string(r.elements) + ',' +
         std::to_string(r.depth) + ',' + (r.closed ? "true" : "false") + ',' + std::to_string(r.min_rank) + ',' +
         std::to_string(r.rank_one_atoms.size()) + ',' + std::to_string(r.skeletons.size()) + '\n';
}

Json to_json(const SkeletonEquivalence& r) {
  return {{"same_initial_skeleton", r.same_initial_skeleton},
          {"verdict_a", to_json(r.verdict_a)},
          {"verdict_b", to_json(r.verdict_b)},
          {"agree", r.agree}};
}

std::string to_csv(const SkeletonEquivalence& r) {
  return "same_initial_skeleton,verdict_a,method_a,verdict_b,method_b,agree\n" +
         std::string(r.same_initial_skeleton ? "true" : "false") + ',' + std::string(to_string(r.verdict_a.verdict)) +
         ',' + std::string(to_string(r.verdict_a.method)) + ',' + std::string(to_string(r.verdict_b.verdict)) + ',' +
         std::string(to_string(r.verdict_b.method)) + ',' + (r.agree ? "true" : "false") + '\n';
}

Json to_json(const ConjugacyReport& r) {
  return {{"phi", r.phi},
          {"mean", r.mean},
          {"variance", r.variance},
          {"expected_mean", r.expected_mean},
          {"expected_variance", r.expected_variance},
          {"mean_err", real_to_json(r.mean_err)},
          {"var_err", real_to_json(r.var_err)},
          {"pass", r.pass}};
}

std::string to_csv(const ConjugacyReport& r) {
  std::ostringstream os;
  os << "agent,phi,mean,expected_mean,variance,expected_variance\n";
  for (std::size_t i = 0; i < r.phi.size(); ++i) {
    os << i << ',' << format_double(r.phi[i]) << ',' << format_double(r.mean[i]) << ','
       << format_double(r.expected_mean[i]) << ',' << format_double(r.variance[i]) << ','
       << format_double(r.expected_variance[i]) << '\n';
  }
  return os.str();
}

Json to_json(const DecayRateReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.per_t_logprob)
    pts.push_back({{"t", p.t},
                   {"exceedances", p.exceedances},
                   {"probability", real_to_json(p.probability)},
                   {"log_probability", real_to_json(p.log_probability)}});
  return {{"empirical_rate", real_to_json(r.empirical_rate)}, {"points_used", r.points_used}, {"per_t", pts}};
}

std::string to_csv(const DecayRateReport& r) {
  std::ostringstream os;
  os << "t,exceedances,probability,log_probability\n";
  for (const auto& p : r.per_t_logprob)
    os << p.t << ',' << p.exceedances << ',' << format_double(p.probability) << ','
       << format_double(p.log_probability) << '\n';
  return os.str();
}

Json trajectory_to_json(const std::vector<BeliefState>& path) {
  Json rows = Json::array();
  for (const auto& s : path) rows.push_back({{"t", s.t}, {"p", s.p}});
  return {{"trajectory", rows}};
}

std::string trajectory_to_csv(const std::vector<BeliefState>& path) {
  std::ostringstream os;
  os << "t";
  const std::size_t n = path.empty() ? 0 : path.front().p.size();
  for (std::size_t i = 0; i < n; ++i) os << ",p_" << i;
  os << '\n';
  for (const auto& s : path) {
    os << s.t;
    for (double v : s.p) os << ',' << format_double(v);
    os << '\n';
  }
  return os.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) raise(Errc::IoError, "failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace degroot

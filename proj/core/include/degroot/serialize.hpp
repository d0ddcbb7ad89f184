#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "degroot/engine.hpp"
#include "degroot/fragmentation.hpp"
#include "degroot/generators.hpp"
#include "degroot/wisdom.hpp"

namespace degroot {

using Json = nlohmann::json;

/// Decimal text with 17 significant digits; infinities print as inf / -inf.
std::string format_double(double v);
/// JSON value for a real: a number, or the strings "inf" / "-inf" / "nan".
Json real_to_json(double v);
double real_from_json(const Json& j);

Json matrix_to_json(const StochasticMatrix& m);
StochasticMatrix matrix_from_json(const Json& j);
Json mask_to_json(const SkeletonMask& m);
SkeletonMask mask_from_json(const Json& j);

/// {"model": <kind>, ...parameters}. Throws InvalidArgument on malformed input.
Json spec_to_json(const GeneratorSpec& spec);
GeneratorSpec spec_from_json(const Json& j);

/// {"atoms": [{"adjacency": [[0, 1], ...], "prob": p}, ...]} or the shorthand
/// {"islands": {"g": g, "p_s": p_s, "p_d": p_d}}.
Json distribution_to_json(const GraphDistribution& dist);
GraphDistribution distribution_from_json(const Json& j);

Json wisdom_config_to_json(const WisdomConfig& c);
WisdomConfig wisdom_config_from_json(const Json& j);

/// Parameters of one CLI run. Each subcommand reads the fields it needs.
struct ExperimentConfig {
  std::string command = "simulate";
  std::uint64_t seed = 1;
  std::string output;  // empty: standard output
  std::string format = "csv";
  std::size_t threads = 0;
  std::optional<GeneratorSpec> model;
  std::optional<GeneratorSpec> model_b;
  std::optional<GraphDistribution> dist;
  std::optional<WisdomConfig> wisdom;
  std::vector<double> p0;
  std::size_t replicas = 1000;
  std::size_t t_max = 1000;
  double gap_tol = kGapTol;
  std::size_t horizon = 50;
  double phi = 1e-6;
  std::size_t t_cap = 0;
  std::size_t quad_points = 256;
  double epsilon = 0.5;
  std::vector<std::size_t> t_grid;
  double atom_tol = 1e-4;
  std::size_t max_len = 8;
  double dedup_tol = 1e-9;
  bool allow_no_positive = false;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

Json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

// Result records.
Json to_json(const InfluenceEstimate& r);
std::string to_csv(const InfluenceEstimate& r);
Json to_json(const WisdomResult& r);
std::string to_csv(const WisdomResult& r);
Json to_json(const FragmentationReport& r);
std::string to_csv(const FragmentationReport& r);
Json to_json(const ConvergenceTimeReport& r);
std::string to_csv(const ConvergenceTimeReport& r);
Json to_json(const DisagreementReport& r);
std::string to_csv(const DisagreementReport& r);
Json to_json(const ConditionCReport& r);
std::string to_csv(const ConditionCReport& r);
Json to_json(const SemigroupReport& r);
std::string to_csv(const SemigroupReport& r);
Json to_json(const SkeletonEquivalence& r);
std::string to_csv(const SkeletonEquivalence& r);
Json to_json(const ConjugacyReport& r);
std::string to_csv(const ConjugacyReport& r);
Json to_json(const DecayRateReport& r);
std::string to_csv(const DecayRateReport& r);
/// Belief trajectory rows (t, p_0, ..., p_{n-1}).
Json trajectory_to_json(const std::vector<BeliefState>& path);
std::string trajectory_to_csv(const std::vector<BeliefState>& path);

/// Writes text to `path`, or to standard output when `path` is empty.
/// Throws IoError when the file cannot be written.
void emit(const std::string& text, const std::string& path);

std::string read_text(const std::string& path);

}  // namespace degroot

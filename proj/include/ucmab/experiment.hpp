#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucmab/bandits.hpp"
#include "ucmab/controller.hpp"
#include "ucmab/episode.hpp"
#include "ucmab/eval.hpp"
#include "ucmab/hillstrom.hpp"
#include "ucmab/simenv.hpp"

namespace ucmab {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { simulate, qini };

enum class PolicyKind { ucmab, cmab, urf, random };

std::string_view to_string(PolicyKind kind) noexcept;
PolicyKind policy_kind_from_string(std::string_view name);

struct SimulationSettings {
  EnvironmentSpec environment{};
  std::size_t window = 500;
  BanditConfig bandit{};
  ControllerConfig controller{};
  std::vector<PolicyKind> policies{PolicyKind::ucmab, PolicyKind::cmab, PolicyKind::urf};
};

enum class EstimatorKind { uplift_forest, two_model };

struct QiniSettings {
  std::filesystem::path dataset;
  HillstromResponse response = HillstromResponse::visit;
  std::vector<HillstromArm> arms{HillstromArm::womens, HillstromArm::mens};
  double holdout_fraction = 0.3;
  std::size_t bins = 10;
  EstimatorKind estimator = EstimatorKind::uplift_forest;
  ForestParams forest{};
  std::size_t permutations = 100;
};

/// One experiment file. Every field has a default; see configs/ and the
/// README for the schema.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::simulate;
  RewardSpec reward{};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::filesystem::path output_dir = "results";
  SimulationSettings simulation{};
  QiniSettings qini{};

  /// Throws ConfigError (or SpecificationError for an invalid surface).
  void validate() const;
};

/// Relative dataset/output paths resolve against `base_dir`. Unknown keys
/// are rejected. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Effective configuration with every default spelled out;
/// parse_config(config_to_json(c)) reproduces c.
nlohmann::json config_to_json(const ExperimentConfig& config);

// ---- simulate ---------------------------------------------------------------

struct PolicyRun {
  PolicyKind kind;
  std::vector<EpisodeResult> episodes;  // one per seed, in seed order
  AggregatedTrace aggregate;
  std::vector<std::size_t> collection_periods;  // controller only
};

struct SimulationResults {
  std::vector<std::uint64_t> seeds;
  std::vector<PolicyRun> runs;  // in configured policy order
};

/// Runs every configured policy for every seed. Seeds run on up to `jobs`
/// threads; results do not depend on `jobs`.
SimulationResults simulate(const ExperimentConfig& config, std::size_t jobs = 1);

nlohmann::json simulation_summary(const ExperimentConfig& config, const SimulationResults& results);

/// simulate() plus regret_<policy>.csv, summary.json and manifest.json in the output directory.
SimulationResults run_simulate(const ExperimentConfig& config, std::size_t jobs = 1);

// ---- qini -------------------------------------------------------------------

struct QiniEvaluation {
  std::vector<QiniPoint> curve;
  std::vector<double> random_line;
  double area = 0.0;
  std::vector<double> null_areas;  // areas of shuffled-score rankings
  double null_p95 = 0.0;
  std::size_t n_train = 0;
  std::size_t n_holdout = 0;
};

struct TrainHoldoutSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> holdout;
};

/// Seeded split, stratified by arm: round(holdout_fraction * n_arm) rows of
/// each arm go to the holdout.
TrainHoldoutSplit split_train_holdout(std::span<const LabeledExample> data, double holdout_fraction,
                                      std::uint64_t seed);

/// Nearest-rank 95th percentile.
double percentile95(std::vector<double> values);

/// Qini area of `scored` re-ranked by `permutations` seeded shuffles of the scores.
std::vector<double> permutation_null(std::span<const ScoredIndividual> scored, std::size_t bins,
                                     std::size_t permutations, std::uint64_t seed);

/// Split, fit the configured estimator, score the holdout, build the curve
/// and the permutation null.
QiniEvaluation evaluate_qini(std::span<const LabeledExample> data, const QiniSettings& settings, std::uint64_t seed);

struct QiniResults {
  std::vector<HillstromArm> arms;
  std::vector<QiniEvaluation> evaluations;
};

nlohmann::json qini_summary(const ExperimentConfig& config, const QiniResults& results);

/// Loads the dataset once per configured arm, evaluates with the first
/// seed, and writes qini_<arm>.csv, summary.json and manifest.json.
QiniResults run_qini(const ExperimentConfig& config);

void write_manifest(const ExperimentConfig& config);

}  // namespace ucmab

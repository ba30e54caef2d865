#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ucmab/adwin.hpp"
#include "ucmab/core.hpp"
#include "ucmab/random.hpp"
#include "ucmab/uplift_forest.hpp"

namespace ucmab {

enum class ControllerPhase { collecting, deployed };

struct ControllerConfig {
  /// Randomized-trial rows gathered before each (re)training.
  std::size_t collection_target = 2000;
  ForestParams forest{};
  AdwinDetector::Params detector{};
  RewardSpec reward_spec{};

  void validate() const;
};

/// Uplift-forest baseline wrapped in a change detector.
///
/// Collecting: assigns arms uniformly at random and buffers the results.
/// Once the buffer reaches the target a forest is fitted and deployed,
/// treating iff predicted uplift > tau. While deployed, a per-decision
/// signal feeds ADWIN; a detection discards the model and the buffer and
/// starts a fresh collection period.
class UpliftController {
 public:
  UpliftController(ControllerConfig config, std::uint64_t seed);

  Treatment act(const ContextPoint& x);

  void feedback(const ContextPoint& x, Treatment arm, Outcome y, double correctness_signal);

  /// feedback() with the signal derived from the realized penalized reward.
  void observe(const ContextPoint& x, Treatment arm, Outcome y);

  ControllerPhase phase() const noexcept { return phase_; }
  double tau() const noexcept { return tau_; }
  const ControllerConfig& config() const noexcept { return config_; }
  const std::vector<LabeledExample>& buffer() const noexcept { return buffer_; }
  const std::optional<UpliftForest>& model() const noexcept { return model_; }
  const AdwinDetector& detector() const noexcept { return detector_; }
  std::size_t collection_periods() const noexcept { return collection_periods_; }
  std::size_t retrainings() const noexcept { return retrainings_; }

 private:
  ControllerConfig config_;
  double tau_;
  ControllerPhase phase_ = ControllerPhase::collecting;
  std::vector<LabeledExample> buffer_;
  std::optional<UpliftForest> model_;
  AdwinDetector detector_;
  Rng rng_;
  std::uint64_t seed_;
  std::size_t collection_periods_ = 1;
  std::size_t retrainings_ = 0;
};

/// Realized penalized reward mapped onto [0, 1] by the reward spec's extreme
/// attainable rewards: (r - r_min) / (r_max - r_min).
double rescaled_reward(Outcome y, Treatment arm, const RewardSpec& spec);

}  // namespace ucmab

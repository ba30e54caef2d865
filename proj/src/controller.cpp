#include "ucmab/controller.hpp"

#include <algorithm>

#include "ucmab/bandits.hpp"
#include "ucmab/errors.hpp"

namespace ucmab {

void ControllerConfig::validate() const {
  if (collection_target < 1) throw ConfigError("collection_target must be >= 1");
  if (forest.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  if (forest.tree.max_depth < 1) throw ConfigError("max_depth must be >= 1");
  AdwinDetector{detector};
  reward_spec.validate();
}

double rescaled_reward(Outcome y, Treatment arm, const RewardSpec& spec) {
  const double r_max = spec.reward_on_response - std::min(spec.penalty_control, spec.penalty_treated);
  const double r_min = spec.reward_on_no_response - std::max(spec.penalty_control, spec.penalty_treated);
  const double r = realized_reward(y, arm, spec);
  return std::clamp((r - r_min) / (r_max - r_min), 0.0, 1.0);
}

UpliftController::UpliftController(ControllerConfig config, std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      tau_(compute_threshold(config_.reward_spec)),
      detector_(config_.detector),
      rng_(mix_seed(seed, 0)),
      seed_(seed) {
  buffer_.reserve(config_.collection_target);
}

Treatment UpliftController::act(const ContextPoint& x) {
  if (phase_ == ControllerPhase::collecting) return rng_.coin() ? Treatment::treated : Treatment::control;
  return select_by_threshold(predict_uplift(*model_, x), tau_);
}

void UpliftController::feedback(const ContextPoint& x, Treatment arm, Outcome y, double correctness_signal) {
  if (phase_ == ControllerPhase::collecting) {
    buffer_.push_back({x, arm, y});
    if (buffer_.size() < config_.collection_target) return;
    ++retrainings_;
    try {
      model_ = fit_forest(buffer_, config_.forest, mix_seed(seed_, retrainings_));
    } catch (const FitError&) {
      // Not enough rows per arm yet; keep collecting.
      --retrainings_;
      return;
    }
    phase_ = ControllerPhase::deployed;
    buffer_.clear();
    detector_.reset();
    return;
  }
  if (detector_.observe(correctness_signal)) {
    model_.reset();
    buffer_.clear();
    phase_ = ControllerPhase::collecting;
    ++collection_periods_;
  }
}

void UpliftController::observe(const ContextPoint& x, Treatment arm, Outcome y) {
  feedback(x, arm, y, rescaled_reward(y, arm, config_.reward_spec));
}

}  // namespace ucmab

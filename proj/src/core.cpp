#include "ucmab/core.hpp"

#include <cmath>
#include <string>

#include "ucmab/errors.hpp"

namespace ucmab {

Treatment treatment_from_index(int arm) {
  if (arm != 0 && arm != 1) throw DomainError("treatment arm must be 0 or 1, got " + std::to_string(arm));
  return static_cast<Treatment>(arm);
}

ContextPoint::ContextPoint(std::vector<double> features) : features_(std::move(features)) {
  if (features_.empty()) throw DomainError("context point needs at least one feature");
  for (double f : features_) {
    if (!std::isfinite(f)) throw DomainError("context point features must be finite");
  }
}

ContextPoint::ContextPoint(std::initializer_list<double> features)
    : ContextPoint(std::vector<double>(features)) {}

void RewardSpec::validate() const {
  if (!std::isfinite(reward_on_response) || reward_on_response <= 0.0)
    throw ConfigError("reward_on_response must be finite and > 0");
  if (reward_on_no_response != 0.0) throw ConfigError("reward_on_no_response must be 0");
  if (!std::isfinite(penalty_control) || !std::isfinite(penalty_treated))
    throw ConfigError("penalties must be finite");
  const double tau = compute_threshold(*this);
  if (!(tau >= -1.0 && tau < 1.0))
    throw ConfigError("threshold (psi_1 - psi_0) / R(Y=1) = " + std::to_string(tau) + " is outside [-1, 1)");
}

double compute_threshold(const RewardSpec& spec) {
  if (!(spec.reward_on_response > 0.0)) throw DomainError("R(Y=1) must be > 0");
  return (spec.penalty_treated - spec.penalty_control) / spec.reward_on_response;
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

double uplift(double p_treated, double p_control) {
  require_probability(p_treated, "p(Y=1|T=1)");
  require_probability(p_control, "p(Y=1|T=0)");
  return p_treated - p_control;
}

double penalized_expected_reward(double p_response, const RewardSpec& spec, Treatment arm) {
  require_probability(p_response, "response probability");
  if (!(spec.reward_on_response > 0.0)) throw DomainError("R(Y=1) must be > 0");
  return spec.reward_on_response * p_response - spec.penalty(arm);
}

Treatment select_by_threshold(double u_hat, double tau) noexcept {
  return u_hat > tau ? Treatment::treated : Treatment::control;
}

Treatment select_by_argmax(std::array<double, 2> penalized_per_arm) noexcept {
  return penalized_per_arm[1] > penalized_per_arm[0] ? Treatment::treated : Treatment::control;
}

}  // namespace ucmab

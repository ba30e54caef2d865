#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ucmab {

enum class Treatment : int { control = 0, treated = 1 };

constexpr int index_of(Treatment arm) noexcept { return static_cast<int>(arm); }

/// Throws DomainError for anything other than 0 or 1.
Treatment treatment_from_index(int arm);

struct Outcome {
  bool responded = false;

  friend bool operator==(Outcome, Outcome) = default;
};

/// An individual's feature vector.
class ContextPoint {
 public:
  ContextPoint() = default;
  explicit ContextPoint(std::vector<double> features);
  ContextPoint(std::initializer_list<double> features);

  std::size_t dimension() const noexcept { return features_.size(); }
  double operator[](std::size_t i) const { return features_[i]; }
  std::span<const double> features() const noexcept { return features_; }

  friend bool operator==(const ContextPoint&, const ContextPoint&) = default;

 private:
  std::vector<double> features_;
};

/// Payoff of each outcome and the per-arm treatment penalties.
///
/// The no-response reward is fixed at zero: only R(Y=1) enters the
/// threshold, and any constant offset would cancel in the arm comparison.
struct RewardSpec {
  double reward_on_response = 1.0;
  double reward_on_no_response = 0.0;
  double penalty_control = 0.0;
  double penalty_treated = 0.0;

  double penalty(Treatment arm) const noexcept {
    return arm == Treatment::treated ? penalty_treated : penalty_control;
  }

  /// Full configuration check: positive finite response reward, zero
  /// non-response reward, finite penalties and a threshold in [-1, 1).
  /// Throws ConfigError.
  void validate() const;
};

/// tau = (psi_1 - psi_0) / R(Y=1). Throws DomainError if R(Y=1) <= 0.
double compute_threshold(const RewardSpec& spec);

/// p1 - p0. Throws DomainError if either probability is outside [0, 1].
double uplift(double p_treated, double p_control);

/// R(Y=1) * p - psi_arm.
double penalized_expected_reward(double p_response, const RewardSpec& spec, Treatment arm);

/// Treated iff u_hat > tau (strict).
Treatment select_by_threshold(double u_hat, double tau) noexcept;

/// Arm with the strictly larger penalized value; ties go to control.
Treatment select_by_argmax(std::array<double, 2> penalized_per_arm) noexcept;

/// Validates a probability, throwing DomainError naming `what` otherwise.
void require_probability(double p, const char* what);

}  // namespace ucmab

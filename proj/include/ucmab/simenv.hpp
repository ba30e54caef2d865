#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ucmab/bandits.hpp"
#include "ucmab/core.hpp"
#include "ucmab/random.hpp"

namespace ucmab {

/// Drift-able parameter vector of a response surface:
///   lift(x) = lift_max * sigmoid(steepness * (lift_weights . x + lift_offset)) - lift_shift
///   base(x) = clamp(base_weights . x + base_offset, base_floor, base_ceiling)
struct SurfaceParams {
  std::vector<double> lift_weights;
  double lift_offset = 0.0;
  double steepness = 1.0;
  double lift_max = 0.0;
  double lift_shift = 0.0;
  std::vector<double> base_weights;
  double base_offset = 0.5;

  /// Componentwise (1 - s) * a + s * b.
  static SurfaceParams interpolate(const SurfaceParams& a, const SurfaceParams& b, double s);

  friend bool operator==(const SurfaceParams&, const SurfaceParams&) = default;
};

double logistic(double z) noexcept;

/// Ground-truth p(Y=1 | T, x): base(x) for control, base(x) + lift(x) for treated.
struct ResponseSurface {
  double base_floor = 0.0;
  double base_ceiling = 1.0;

  double lift(const SurfaceParams& theta, std::span<const double> x) const;
  double base(const SurfaceParams& theta, std::span<const double> x) const;
};

enum class DriftKind { none, sudden, gradual };

std::string_view to_string(DriftKind kind) noexcept;
/// Throws ConfigError on an unknown name.
DriftKind drift_kind_from_string(std::string_view name);

/// theta(t): constant for `none`; start before t_change and end from t_change
/// on for `sudden`; linear from start at t_begin to end at t_end for `gradual`.
struct DriftSchedule {
  DriftKind kind = DriftKind::none;
  SurfaceParams start;
  SurfaceParams end;
  std::uint64_t t_change = 0;
  std::uint64_t t_begin = 0;
  std::uint64_t t_end = 0;

  SurfaceParams at(std::uint64_t t) const;
  /// Steps where the environment starts or stops changing.
  std::vector<std::uint64_t> markers() const;
};

struct EnvironmentSpec {
  std::size_t dimension = 2;
  ResponseSurface surface{};
  DriftSchedule schedule{};
  RewardSpec reward_spec{};
  std::uint64_t horizon = 100000;
  std::uint64_t seed = 0;
};

enum class IndividualType { X1, X2, X3, X4 };

std::string_view to_string(IndividualType type) noexcept;

/// Non-stationary two-arm response environment over Uniform([0,1]^n).
///
/// Construction validates the EnvironmentSpec and checks base and base + lift against
/// [0, 1] on a dense grid for every parameter vector the schedule can reach
/// (both endpoints, plus interior points of a gradual drift).
class Environment {
 public:
  /// Throws ConfigError for malformed specs and SpecificationError when a
  /// surface leaves [0, 1].
  explicit Environment(EnvironmentSpec spec);

  const EnvironmentSpec& spec() const noexcept { return spec_; }
  double tau() const noexcept { return tau_; }
  ContextBounds bounds() const;

  ContextPoint sample_context(Rng& rng) const;

  SurfaceParams parameters_at(std::uint64_t t) const { return spec_.schedule.at(t); }
  double lift(const ContextPoint& x, std::uint64_t t) const;
  double true_probability(const ContextPoint& x, Treatment arm, std::uint64_t t) const;
  Outcome respond(const ContextPoint& x, Treatment arm, std::uint64_t t, Rng& rng) const;

  /// Arm 1 iff the true lift exceeds tau (strict).
  Treatment optimal_action(const ContextPoint& x, std::uint64_t t) const;

  /// Defined only where both arms respond with probability exactly 0 or 1;
  /// throws DomainError otherwise.
  IndividualType classify_individual(const ContextPoint& x, std::uint64_t t) const;

 private:
  EnvironmentSpec spec_;
  double tau_;
};

/// 0 when the chosen arm matches the oracle's, else 1.
double step_regret(Treatment chosen, Treatment optimal) noexcept;

/// Checks base and base + lift against [0, 1] over the validation grid:
/// 1000 points per dimension, every pair of dimensions for n >= 3 (other
/// coordinates pinned at 0, 0.5 and 1). Throws SpecificationError.
void validate_surface(std::size_t dimension, const ResponseSurface& surface, const SurfaceParams& theta);

}  // namespace ucmab

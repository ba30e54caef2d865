#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "ucmab/core.hpp"
#include "ucmab/random.hpp"

namespace ucmab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Per-dimension context bounds, declared by the environment or dataset.
using ContextBounds = std::vector<Interval>;

/// Hyperparameters shared by the U-CMAB and the plain CMAB.
///
/// Defaults were picked so that a two-dimensional environment with a 10^5
/// step horizon gives every (cell, arm) pair enough exploratory visits for
/// the constant step size to forget its initial value well before the
/// horizon ends.
struct BanditConfig {
  double epsilon = 0.1;
  double step_size = 0.02;
  std::size_t bins_per_dimension = 4;
  RewardSpec reward_spec{};
  double optimism = 0.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Uniform grid over a bounding box. Points outside the box fall into the
/// nearest edge cell; the upper edge belongs to the last cell.
class GridDiscretizer {
 public:
  GridDiscretizer(ContextBounds bounds, std::size_t bins_per_dimension);

  std::size_t dimension() const noexcept { return bounds_.size(); }
  std::size_t bins_per_dimension() const noexcept { return bins_; }
  std::size_t cell_count() const noexcept { return cell_count_; }
  const ContextBounds& bounds() const noexcept { return bounds_; }

  /// Per-dimension bin indices. Throws DomainError on dimension mismatch.
  std::vector<std::size_t> coordinates(const ContextPoint& x) const;

  /// Row-major flat index, dimension 0 most significant.
  std::size_t flat_index(const ContextPoint& x) const;

 private:
  ContextBounds bounds_;
  std::size_t bins_;
  std::size_t cell_count_;
};

/// Tabular estimate of the expected response reward E[R(Y) | T, cell],
/// tracked with a constant step size. Penalties are constants, so the agent
/// subtracts them on read instead of baking them into the table.
class ValueEstimator {
 public:
  ValueEstimator(GridDiscretizer grid, double initial_value);

  const GridDiscretizer& grid() const noexcept { return grid_; }
  double value(std::size_t cell, Treatment arm) const;
  std::array<double, 2> values(std::size_t cell) const;

  /// Q <- Q + step_size * (target - Q) on exactly one entry.
  void track(std::size_t cell, Treatment arm, double target, double step_size);

  std::span<const double> table() const noexcept { return table_; }
  void assign_table(std::vector<double> table);

 private:
  GridDiscretizer grid_;
  std::vector<double> table_;  // cell-major, two arms per cell
};

/// R(y) - psi_arm.
double realized_reward(Outcome y, Treatment arm, const RewardSpec& spec) noexcept;

/// Epsilon-greedy contextual bandit over a discretized context space.
///
/// The U-CMAB and the plain CMAB share this class and differ only in the
/// penalties they learn from: the CMAB has both penalties forced to zero.
/// Single writer: `act` and `update` must be serialized per agent.
class EpsilonGreedyAgent {
 public:
  EpsilonGreedyAgent(BanditConfig config, ContextBounds bounds, std::uint64_t seed);

  const BanditConfig& config() const noexcept { return config_; }
  const ValueEstimator& estimator() const noexcept { return estimator_; }
  std::uint64_t steps_taken() const noexcept { return steps_taken_; }

  /// Penalized estimates (r_u for control, r_u for treated) of one cell.
  std::array<double, 2> penalized_values(std::size_t cell) const;

  /// Explores uniformly with probability epsilon, otherwise greedy.
  Treatment act(const ContextPoint& x);
  Treatment greedy_action(const ContextPoint& x) const;

  /// Tracks a realized penalized reward for (cell of x, arm).
  /// Throws DomainError on a non-finite reward.
  void update(const ContextPoint& x, Treatment arm, double reward);

  /// update() with the realized reward under this agent's own penalties.
  void observe(const ContextPoint& x, Treatment arm, Outcome y);

  /// Checkpoint: config, bounds, table, step counter and generator state.
  nlohmann::json to_json() const;
  static EpsilonGreedyAgent from_json(const nlohmann::json& doc);

 private:
  BanditConfig config_;
  ValueEstimator estimator_;
  std::uint64_t steps_taken_ = 0;
  Rng rng_;
};

/// Uplifted CMAB: learns the penalized reward with the configured penalties.
EpsilonGreedyAgent make_ucmab(const BanditConfig& config, ContextBounds bounds, std::uint64_t seed);

/// Plain CMAB: same learner with both penalties forced to zero.
EpsilonGreedyAgent make_cmab(const BanditConfig& config, ContextBounds bounds, std::uint64_t seed);

}  // namespace ucmab

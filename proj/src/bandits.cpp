#include "ucmab/bandits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ucmab/errors.hpp"

namespace ucmab {

void BanditConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(step_size > 0.0 && step_size <= 1.0)) throw ConfigError("step_size must lie in (0, 1]");
  if (bins_per_dimension < 1) throw ConfigError("bins_per_dimension must be >= 1");
  if (!std::isfinite(optimism)) throw ConfigError("optimism must be finite");
  reward_spec.validate();
}

GridDiscretizer::GridDiscretizer(ContextBounds bounds, std::size_t bins_per_dimension)
    : bounds_(std::move(bounds)), bins_(bins_per_dimension), cell_count_(1) {
  if (bounds_.empty()) throw ConfigError("context bounds need at least one dimension");
  if (bins_ < 1) throw ConfigError("bins_per_dimension must be >= 1");
  for (const auto& b : bounds_) {
    if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi))
      throw ConfigError("context bounds must be finite with lo < hi");
    if (cell_count_ > std::numeric_limits<std::size_t>::max() / bins_)
      throw ConfigError("grid too large");
    cell_count_ *= bins_;
  }
}

std::vector<std::size_t> GridDiscretizer::coordinates(const ContextPoint& x) const {
  if (x.dimension() != bounds_.size())
    throw DomainError("context has dimension " + std::to_string(x.dimension()) + ", grid expects " +
                      std::to_string(bounds_.size()));
  std::vector<std::size_t> coords(bounds_.size());
  const double bins = static_cast<double>(bins_);
  for (std::size_t d = 0; d < bounds_.size(); ++d) {
    const double scaled = (x[d] - bounds_[d].lo) / (bounds_[d].hi - bounds_[d].lo) * bins;
    const double clamped = std::clamp(std::floor(scaled), 0.0, bins - 1.0);
    coords[d] = static_cast<std::size_t>(clamped);
  }
  return coords;
}

std::size_t GridDiscretizer::flat_index(const ContextPoint& x) const {
  std::size_t flat = 0;
  for (std::size_t c : coordinates(x)) flat = flat * bins_ + c;
  return flat;
}

ValueEstimator::ValueEstimator(GridDiscretizer grid, double initial_value)
    : grid_(std::move(grid)), table_(grid_.cell_count() * 2, initial_value) {}

double ValueEstimator::value(std::size_t cell, Treatment arm) const {
  return table_.at(cell * 2 + static_cast<std::size_t>(index_of(arm)));
}

std::array<double, 2> ValueEstimator::values(std::size_t cell) const {
  return {value(cell, Treatment::control), value(cell, Treatment::treated)};
}

void ValueEstimator::track(std::size_t cell, Treatment arm, double target, double step_size) {
  double& q = table_.at(cell * 2 + static_cast<std::size_t>(index_of(arm)));
  q = (1.0 - step_size) * q + step_size * target;  // exact replacement when step_size == 1
}

void ValueEstimator::assign_table(std::vector<double> table) {
  if (table.size() != table_.size()) throw DomainError("value table size does not match grid");
  for (double v : table) {
    if (!std::isfinite(v)) throw DomainError("value table entries must be finite");
  }
  table_ = std::move(table);
}

double realized_reward(Outcome y, Treatment arm, const RewardSpec& spec) noexcept {
  const double reward = y.responded ? spec.reward_on_response : spec.reward_on_no_response;
  return reward - spec.penalty(arm);
}

EpsilonGreedyAgent::EpsilonGreedyAgent(BanditConfig config, ContextBounds bounds, std::uint64_t seed)
    : config_((config.validate(), std::move(config))),
      estimator_(GridDiscretizer(std::move(bounds), config_.bins_per_dimension), config_.optimism),
      rng_(seed) {}

Treatment EpsilonGreedyAgent::act(const ContextPoint& x) {
  ++steps_taken_;
  // Both draws happen every step so the stream position depends only on the
  // number of decisions, not on which branch was taken.
  const bool explore = rng_.uniform() < config_.epsilon;
  const bool random_arm = rng_.coin();
  if (explore) return random_arm ? Treatment::treated : Treatment::control;
  return greedy_action(x);
}

std::array<double, 2> EpsilonGreedyAgent::penalized_values(std::size_t cell) const {
  const auto& spec = config_.reward_spec;
  const auto q = estimator_.values(cell);
  return {q[0] - spec.penalty_control, q[1] - spec.penalty_treated};
}

Treatment EpsilonGreedyAgent::greedy_action(const ContextPoint& x) const {
  return select_by_argmax(penalized_values(estimator_.grid().flat_index(x)));
}

void EpsilonGreedyAgent::update(const ContextPoint& x, Treatment arm, double reward) {
  if (!std::isfinite(reward)) throw DomainError("reward must be finite");
  estimator_.track(estimator_.grid().flat_index(x), arm, reward + config_.reward_spec.penalty(arm),
                   config_.step_size);
}

void EpsilonGreedyAgent::observe(const ContextPoint& x, Treatment arm, Outcome y) {
  // Track R(y) directly; adding the penalty back to R(y) - psi can round.
  const double reward = y.responded ? config_.reward_spec.reward_on_response : config_.reward_spec.reward_on_no_response;
  estimator_.track(estimator_.grid().flat_index(x), arm, reward, config_.step_size);
}

nlohmann::json EpsilonGreedyAgent::to_json() const {
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& b : estimator_.grid().bounds()) bounds.push_back({b.lo, b.hi});
  const auto& spec = config_.reward_spec;
  return {
      {"config",
       {{"epsilon", config_.epsilon},
        {"step_size", config_.step_size},
        {"bins_per_dimension", config_.bins_per_dimension},
        {"optimism", config_.optimism},
        {"reward",
         {{"reward_on_response", spec.reward_on_response},
          {"reward_on_no_response", spec.reward_on_no_response},
          {"penalty_control", spec.penalty_control},
          {"penalty_treated", spec.penalty_treated}}}}},
      {"bounds", bounds},
      {"table", std::vector<double>(estimator_.table().begin(), estimator_.table().end())},
      {"steps_taken", steps_taken_},
      {"rng_state", rng_.serialize()},
  };
}

EpsilonGreedyAgent EpsilonGreedyAgent::from_json(const nlohmann::json& doc) {
  try {
    const auto& c = doc.at("config");
    const auto& r = c.at("reward");
    BanditConfig config;
    config.epsilon = c.at("epsilon").get<double>();
    config.step_size = c.at("step_size").get<double>();
    config.bins_per_dimension = c.at("bins_per_dimension").get<std::size_t>();
    config.optimism = c.at("optimism").get<double>();
    config.reward_spec.reward_on_response = r.at("reward_on_response").get<double>();
    config.reward_spec.reward_on_no_response = r.at("reward_on_no_response").get<double>();
    config.reward_spec.penalty_control = r.at("penalty_control").get<double>();
    config.reward_spec.penalty_treated = r.at("penalty_treated").get<double>();
    ContextBounds bounds;
    for (const auto& b : doc.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    EpsilonGreedyAgent agent(config, std::move(bounds), 0);
    agent.estimator_.assign_table(doc.at("table").get<std::vector<double>>());
    agent.steps_taken_ = doc.at("steps_taken").get<std::uint64_t>();
    agent.rng_ = Rng::deserialize(doc.at("rng_state").get<std::string>());
    return agent;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed agent checkpoint: ") + e.what());
  }
}

EpsilonGreedyAgent make_ucmab(const BanditConfig& config, ContextBounds bounds, std::uint64_t seed) {
  return EpsilonGreedyAgent(config, std::move(bounds), seed);
}

EpsilonGreedyAgent make_cmab(const BanditConfig& config, ContextBounds bounds, std::uint64_t seed) {
  BanditConfig plain = config;
  plain.reward_spec.penalty_control = 0.0;
  plain.reward_spec.penalty_treated = 0.0;
  return EpsilonGreedyAgent(std::move(plain), std::move(bounds), seed);
}

}  // namespace ucmab

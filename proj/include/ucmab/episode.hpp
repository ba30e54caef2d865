#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucmab/bandits.hpp"
#include "ucmab/controller.hpp"
#include "ucmab/eval.hpp"
#include "ucmab/simenv.hpp"

namespace ucmab {

/// A treatment policy as seen by the episode loop. Policies only ever see
/// contexts and outcomes; the oracle stays inside the runner.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Treatment act(const ContextPoint& x, std::uint64_t t) = 0;
  virtual void feedback(const ContextPoint& x, Treatment arm, Outcome y) = 0;
  /// True while the policy assigns arms at random by design (a collection period).
  virtual bool collecting() const { return false; }
};

class AgentPolicy final : public Policy {
 public:
  explicit AgentPolicy(EpsilonGreedyAgent agent) : agent_(std::move(agent)) {}
  Treatment act(const ContextPoint& x, std::uint64_t) override { return agent_.act(x); }
  void feedback(const ContextPoint& x, Treatment arm, Outcome y) override { agent_.observe(x, arm, y); }
  const EpsilonGreedyAgent& agent() const noexcept { return agent_; }

 private:
  EpsilonGreedyAgent agent_;
};

class ControllerPolicy final : public Policy {
 public:
  explicit ControllerPolicy(UpliftController controller) : controller_(std::move(controller)) {}
  Treatment act(const ContextPoint& x, std::uint64_t) override { return controller_.act(x); }
  void feedback(const ContextPoint& x, Treatment arm, Outcome y) override { controller_.observe(x, arm, y); }
  bool collecting() const override { return controller_.phase() == ControllerPhase::collecting; }
  const UpliftController& controller() const noexcept { return controller_; }

 private:
  UpliftController controller_;
};

/// Uniformly random arm every step.
class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Treatment act(const ContextPoint&, std::uint64_t) override {
    return rng_.coin() ? Treatment::treated : Treatment::control;
  }
  void feedback(const ContextPoint&, Treatment, Outcome) override {}

 private:
  Rng rng_;
};

/// The all-knowing tau-threshold policy.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(const Environment& env) : env_(env) {}
  Treatment act(const ContextPoint& x, std::uint64_t t) override { return env_.optimal_action(x, t); }
  void feedback(const ContextPoint&, Treatment, Outcome) override {}

 private:
  const Environment& env_;
};

struct EpisodeResult {
  std::vector<double> regret;          // per-step 0/1 causal regret
  std::vector<std::uint8_t> collecting;  // policy phase at decision time
  RegretTrace trace;                   // windowed regret
};

/// Runs one episode of env.spec().horizon steps with the given seed: sample
/// a context, ask the policy, draw the outcome, return the outcome as
/// feedback, and score the decision against the oracle.
EpisodeResult run_episode(const Environment& env, Policy& policy, std::size_t window, std::uint64_t seed);

/// Same, using the seed stored in the environment spec.
EpisodeResult run_episode(const Environment& env, Policy& policy, std::size_t window);

}  // namespace ucmab

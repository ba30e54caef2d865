#include "ucmab/episode.hpp"

#include "ucmab/errors.hpp"

namespace ucmab {

EpisodeResult run_episode(const Environment& env, Policy& policy, std::size_t window, std::uint64_t seed) {
  if (window < 1) throw DomainError("window must be >= 1");
  const std::uint64_t horizon = env.spec().horizon;
  Rng context_rng(mix_seed(seed, 0));
  Rng outcome_rng(mix_seed(seed, 1));

  EpisodeResult result;
  result.regret.reserve(horizon);
  result.collecting.reserve(horizon);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const ContextPoint x = env.sample_context(context_rng);
    result.collecting.push_back(policy.collecting() ? 1 : 0);
    const Treatment arm = policy.act(x, t);
    const Outcome y = env.respond(x, arm, t, outcome_rng);
    policy.feedback(x, arm, y);
    result.regret.push_back(step_regret(arm, env.optimal_action(x, t)));
  }
  result.trace = windowed_regret(result.regret, window, env.spec().schedule.markers());
  return result;
}

EpisodeResult run_episode(const Environment& env, Policy& policy, std::size_t window) {
  return run_episode(env, policy, window, env.spec().seed);
}

}  // namespace ucmab

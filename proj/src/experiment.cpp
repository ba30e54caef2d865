#include "ucmab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "ucmab/errors.hpp"

namespace ucmab {

using nlohmann::json;

namespace {

// ---- config parsing helpers -------------------------------------------------

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& section) {
  if (!j.is_object()) throw ConfigError("section '" + section + "' must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown key '" + item.key() + "' in section '" + section + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in section '" + section + "' has the wrong type");
  }
}

void read_surface(const json& j, SurfaceParams& s, const std::string& section) {
  check_keys(j, {"lift_weights", "lift_offset", "steepness", "lift_max", "lift_shift", "base_weights", "base_offset"},
             section);
  read(j, "lift_weights", s.lift_weights, section);
  read(j, "lift_offset", s.lift_offset, section);
  read(j, "steepness", s.steepness, section);
  read(j, "lift_max", s.lift_max, section);
  read(j, "lift_shift", s.lift_shift, section);
  read(j, "base_weights", s.base_weights, section);
  read(j, "base_offset", s.base_offset, section);
}

json surface_to_json(const SurfaceParams& s) {
  return {{"lift_weights", s.lift_weights}, {"lift_offset", s.lift_offset}, {"steepness", s.steepness},
          {"lift_max", s.lift_max},         {"lift_shift", s.lift_shift},   {"base_weights", s.base_weights},
          {"base_offset", s.base_offset}};
}

void read_forest(const json& j, ForestParams& f, const std::string& section) {
  read(j, "n_trees", f.n_trees, section);
  read(j, "max_depth", f.tree.max_depth, section);
  read(j, "min_group", f.tree.min_group, section);
  read(j, "features_per_split", f.tree.features_per_split, section);
  read(j, "bootstrap", f.bootstrap, section);
  read(j, "subsample_features", f.subsample_features, section);
}

json forest_to_json(const ForestParams& f) {
  return {{"n_trees", f.n_trees},
          {"max_depth", f.tree.max_depth},
          {"min_group", f.tree.min_group},
          {"features_per_split", f.tree.features_per_split},
          {"bootstrap", f.bootstrap},
          {"subsample_features", f.subsample_features}};
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string_view to_string(ExperimentKind k) { return k == ExperimentKind::simulate ? "simulate" : "qini"; }
std::string_view to_string(EstimatorKind k) { return k == EstimatorKind::uplift_forest ? "uplift_forest" : "two_model"; }

// ---- simulation helpers -----------------------------------------------------

std::unique_ptr<Policy> make_policy(PolicyKind kind, const ExperimentConfig& config, const Environment& env,
                                    std::uint64_t seed) {
  const auto& sim = config.simulation;
  BanditConfig bandit = sim.bandit;
  bandit.reward_spec = config.reward;
  ControllerConfig controller = sim.controller;
  controller.reward_spec = config.reward;
  switch (kind) {
    // The two bandits share an exploration stream so they differ only in penalties.
    case PolicyKind::ucmab: return std::make_unique<AgentPolicy>(make_ucmab(bandit, env.bounds(), mix_seed(seed, 100)));
    case PolicyKind::cmab: return std::make_unique<AgentPolicy>(make_cmab(bandit, env.bounds(), mix_seed(seed, 100)));
    case PolicyKind::urf: return std::make_unique<ControllerPolicy>(UpliftController(controller, mix_seed(seed, 101)));
    case PolicyKind::random: return std::make_unique<RandomPolicy>(mix_seed(seed, 102));
  }
  throw ConfigError("unknown policy");
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::ucmab: return "ucmab";
    case PolicyKind::cmab: return "cmab";
    case PolicyKind::urf: return "urf";
    case PolicyKind::random: return "random";
  }
  return "random";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  for (auto k : {PolicyKind::ucmab, PolicyKind::cmab, PolicyKind::urf, PolicyKind::random}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  reward.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (kind == ExperimentKind::simulate) {
    const auto& sim = simulation;
    if (sim.window < 1) throw ConfigError("window must be >= 1");
    if (sim.policies.empty()) throw ConfigError("at least one policy is required");
    BanditConfig bandit = sim.bandit;
    bandit.reward_spec = reward;
    bandit.validate();
    ControllerConfig controller = sim.controller;
    controller.reward_spec = reward;
    controller.validate();
    EnvironmentSpec env = sim.environment;
    env.reward_spec = reward;
    Environment{env};
  } else {
    const auto& q = qini;
    if (q.dataset.empty()) throw ConfigError("qini experiments need a dataset path");
    if (q.arms.empty()) throw ConfigError("at least one treatment arm is required");
    if (!(q.holdout_fraction > 0.0 && q.holdout_fraction < 1.0)) throw ConfigError("holdout_fraction must lie in (0, 1)");
    if (q.bins < 1) throw ConfigError("bins must be >= 1");
    if (q.forest.n_trees < 1) throw ConfigError("n_trees must be >= 1");
  }
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  check_keys(doc, {"kind", "reward", "seeds", "output_dir", "environment", "bandit", "controller", "policies", "dataset",
                   "evaluation", "estimator"},
             "root");
  std::string kind = "simulate";
  read(doc, "kind", kind, "root");
  if (kind == "simulate") {
    c.kind = ExperimentKind::simulate;
  } else if (kind == "qini") {
    c.kind = ExperimentKind::qini;
  } else {
    throw ConfigError("unknown experiment kind '" + kind + "'");
  }
  read(doc, "seeds", c.seeds, "root");
  std::string out = c.output_dir.string();
  read(doc, "output_dir", out, "root");
  c.output_dir = resolve(base_dir, out);

  if (doc.contains("reward")) {
    const auto& r = doc["reward"];
    check_keys(r, {"reward_on_response", "reward_on_no_response", "penalty_control", "penalty_treated"}, "reward");
    read(r, "reward_on_response", c.reward.reward_on_response, "reward");
    read(r, "reward_on_no_response", c.reward.reward_on_no_response, "reward");
    read(r, "penalty_control", c.reward.penalty_control, "reward");
    read(r, "penalty_treated", c.reward.penalty_treated, "reward");
  }

  auto& sim = c.simulation;
  auto& env = sim.environment;
  // Default surface: threshold boundary at x0 = 0.5, mild base-rate slope on x1.
  env.schedule.start = SurfaceParams{{1.0, 0.0}, -0.5, 20.0, 0.6, 0.1, {0.0, 0.2}, 0.2};
  if (doc.contains("environment")) {
    const auto& e = doc["environment"];
    check_keys(e, {"dimension", "horizon", "window", "base_floor", "base_ceiling", "surface", "drift"}, "environment");
    read(e, "dimension", env.dimension, "environment");
    read(e, "horizon", env.horizon, "environment");
    read(e, "window", sim.window, "environment");
    read(e, "base_floor", env.surface.base_floor, "environment");
    read(e, "base_ceiling", env.surface.base_ceiling, "environment");
    if (e.contains("surface")) read_surface(e["surface"], env.schedule.start, "environment.surface");
    if (e.contains("drift")) {
      const auto& d = e["drift"];
      check_keys(d, {"kind", "t_change", "t_begin", "t_end", "end"}, "environment.drift");
      std::string drift = "none";
      read(d, "kind", drift, "environment.drift");
      env.schedule.kind = drift_kind_from_string(drift);
      read(d, "t_change", env.schedule.t_change, "environment.drift");
      read(d, "t_begin", env.schedule.t_begin, "environment.drift");
      read(d, "t_end", env.schedule.t_end, "environment.drift");
      env.schedule.end = env.schedule.start;
      if (d.contains("end")) read_surface(d["end"], env.schedule.end, "environment.drift.end");
    }
  }
  if (env.schedule.kind == DriftKind::none) env.schedule.end = env.schedule.start;

  if (doc.contains("bandit")) {
    const auto& b = doc["bandit"];
    check_keys(b, {"epsilon", "step_size", "bins_per_dimension", "optimism"}, "bandit");
    read(b, "epsilon", sim.bandit.epsilon, "bandit");
    read(b, "step_size", sim.bandit.step_size, "bandit");
    read(b, "bins_per_dimension", sim.bandit.bins_per_dimension, "bandit");
    read(b, "optimism", sim.bandit.optimism, "bandit");
  }
  if (doc.contains("controller")) {
    const auto& k = doc["controller"];
    check_keys(k, {"collection_target", "n_trees", "max_depth", "min_group", "features_per_split", "bootstrap",
                   "subsample_features", "delta", "max_buckets", "clock", "min_subwindow"},
               "controller");
    read(k, "collection_target", sim.controller.collection_target, "controller");
    read_forest(k, sim.controller.forest, "controller");
    read(k, "delta", sim.controller.detector.delta, "controller");
    read(k, "max_buckets", sim.controller.detector.max_buckets, "controller");
    read(k, "clock", sim.controller.detector.clock, "controller");
    read(k, "min_subwindow", sim.controller.detector.min_subwindow, "controller");
  }
  if (doc.contains("policies")) {
    std::vector<std::string> names;
    read(doc, "policies", names, "root");
    sim.policies.clear();
    for (const auto& n : names) sim.policies.push_back(policy_kind_from_string(n));
  }

  auto& q = c.qini;
  if (doc.contains("dataset")) {
    const auto& d = doc["dataset"];
    check_keys(d, {"path", "response", "treatment_arms"}, "dataset");
    std::string path;
    read(d, "path", path, "dataset");
    if (!path.empty()) q.dataset = resolve(base_dir, path);
    std::string response = "visit";
    read(d, "response", response, "dataset");
    q.response = hillstrom_response_from_string(response);
    if (d.contains("treatment_arms")) {
      std::vector<std::string> arms;
      read(d, "treatment_arms", arms, "dataset");
      q.arms.clear();
      for (const auto& a : arms) q.arms.push_back(hillstrom_arm_from_string(a));
    }
  }
  if (doc.contains("evaluation")) {
    const auto& ev = doc["evaluation"];
    check_keys(ev, {"holdout_fraction", "bins", "permutations"}, "evaluation");
    read(ev, "holdout_fraction", q.holdout_fraction, "evaluation");
    read(ev, "bins", q.bins, "evaluation");
    read(ev, "permutations", q.permutations, "evaluation");
  }
  if (doc.contains("estimator")) {
    const auto& es = doc["estimator"];
    check_keys(es, {"kind", "n_trees", "max_depth", "min_group", "features_per_split", "bootstrap", "subsample_features"},
               "estimator");
    std::string kind_name = "uplift_forest";
    read(es, "kind", kind_name, "estimator");
    if (kind_name == "uplift_forest") {
      q.estimator = EstimatorKind::uplift_forest;
    } else if (kind_name == "two_model") {
      q.estimator = EstimatorKind::two_model;
    } else {
      throw ConfigError("unknown estimator '" + kind_name + "'");
    }
    read_forest(es, q.forest, "estimator");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  const auto& sim = c.simulation;
  const auto& env = sim.environment;
  json drift = {{"kind", to_string(env.schedule.kind)}};
  if (env.schedule.kind == DriftKind::sudden) drift["t_change"] = env.schedule.t_change;
  if (env.schedule.kind == DriftKind::gradual) {
    drift["t_begin"] = env.schedule.t_begin;
    drift["t_end"] = env.schedule.t_end;
  }
  if (env.schedule.kind != DriftKind::none) drift["end"] = surface_to_json(env.schedule.end);

  std::vector<std::string> policies;
  for (auto p : sim.policies) policies.emplace_back(to_string(p));
  std::vector<std::string> arms;
  for (auto a : c.qini.arms) arms.emplace_back(to_string(a));

  json controller = forest_to_json(sim.controller.forest);
  controller["collection_target"] = sim.controller.collection_target;
  controller["delta"] = sim.controller.detector.delta;
  controller["max_buckets"] = sim.controller.detector.max_buckets;
  controller["clock"] = sim.controller.detector.clock;
  controller["min_subwindow"] = sim.controller.detector.min_subwindow;

  json estimator = forest_to_json(c.qini.forest);
  estimator["kind"] = to_string(c.qini.estimator);

  return {
      {"kind", to_string(c.kind)},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir.string()},
      {"reward",
       {{"reward_on_response", c.reward.reward_on_response},
        {"reward_on_no_response", c.reward.reward_on_no_response},
        {"penalty_control", c.reward.penalty_control},
        {"penalty_treated", c.reward.penalty_treated}}},
      {"environment",
       {{"dimension", env.dimension},
        {"horizon", env.horizon},
        {"window", sim.window},
        {"base_floor", env.surface.base_floor},
        {"base_ceiling", env.surface.base_ceiling},
        {"surface", surface_to_json(env.schedule.start)},
        {"drift", drift}}},
      {"bandit",
       {{"epsilon", sim.bandit.epsilon},
        {"step_size", sim.bandit.step_size},
        {"bins_per_dimension", sim.bandit.bins_per_dimension},
        {"optimism", sim.bandit.optimism}}},
      {"controller", controller},
      {"policies", policies},
      {"dataset",
       {{"path", c.qini.dataset.string()}, {"response", to_string(c.qini.response)}, {"treatment_arms", arms}}},
      {"evaluation",
       {{"holdout_fraction", c.qini.holdout_fraction}, {"bins", c.qini.bins}, {"permutations", c.qini.permutations}}},
      {"estimator", estimator},
  };
}

// ---- simulate ---------------------------------------------------------------

SimulationResults simulate(const ExperimentConfig& config, std::size_t jobs) {
  config.validate();
  if (config.kind != ExperimentKind::simulate) throw ConfigError("not a simulate experiment");
  EnvironmentSpec spec = config.simulation.environment;
  spec.reward_spec = config.reward;
  const Environment env(spec);

  const auto& policies = config.simulation.policies;
  const std::size_t n = config.seeds.size();
  SimulationResults results;
  results.seeds = config.seeds;
  results.runs.resize(policies.size());
  for (std::size_t p = 0; p < policies.size(); ++p) {
    results.runs[p].kind = policies[p];
    results.runs[p].episodes.resize(n);
    results.runs[p].collection_periods.assign(n, 0);
  }

  parallel_for(n, jobs, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    for (std::size_t p = 0; p < policies.size(); ++p) {
      auto policy = make_policy(policies[p], config, env, seed);
      results.runs[p].episodes[i] = run_episode(env, *policy, config.simulation.window, seed);
      if (const auto* c = dynamic_cast<const ControllerPolicy*>(policy.get()))
        results.runs[p].collection_periods[i] = c->controller().collection_periods();
    }
  });

  for (auto& run : results.runs) {
    std::vector<RegretTrace> traces;
    traces.reserve(run.episodes.size());
    for (const auto& e : run.episodes) traces.push_back(e.trace);
    run.aggregate = aggregate_traces(traces);
  }
  return results;
}

json simulation_summary(const ExperimentConfig& config, const SimulationResults& results) {
  json policies = json::object();
  for (const auto& run : results.runs) {
    std::vector<double> finals;
    double overall = 0.0;
    std::size_t steps = 0;
    for (const auto& e : run.episodes) {
      finals.push_back(e.trace.values.empty() ? 0.0 : e.trace.values.back());
      overall = std::accumulate(e.regret.begin(), e.regret.end(), overall);
      steps += e.regret.size();
    }
    const double mean_final = std::accumulate(finals.begin(), finals.end(), 0.0) / static_cast<double>(finals.size());
    json entry = {{"csv", "regret_" + std::string(to_string(run.kind)) + ".csv"},
                  {"mean_final_window_regret", mean_final},
                  {"final_window_regret_per_seed", finals},
                  {"mean_regret", steps ? overall / static_cast<double>(steps) : 0.0}};
    if (run.kind == PolicyKind::urf) entry["collection_periods_per_seed"] = run.collection_periods;
    policies[std::string(to_string(run.kind))] = std::move(entry);
  }
  const auto& env = config.simulation.environment;
  return {{"kind", "simulate"},
          {"version", kVersion},
          {"tau", compute_threshold(config.reward)},
          {"horizon", env.horizon},
          {"window", config.simulation.window},
          {"drift_kind", to_string(env.schedule.kind)},
          {"drift_markers", env.schedule.markers()},
          {"seeds", results.seeds},
          {"policies", policies}};
}

void write_manifest(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  write_json(config.output_dir / "manifest.json", {{"tool", "ucmab"},
                                                   {"version", kVersion},
                                                   {"kind", to_string(config.kind)},
                                                   {"seeds", config.seeds},
                                                   {"config", config_to_json(config)}});
}

SimulationResults run_simulate(const ExperimentConfig& config, std::size_t jobs) {
  SimulationResults results = simulate(config, jobs);
  std::filesystem::create_directories(config.output_dir);
  for (const auto& run : results.runs) {
    std::ostringstream csv;
    write_aggregate_csv(csv, run.aggregate);
    write_text(config.output_dir / ("regret_" + std::string(to_string(run.kind)) + ".csv"), csv.str());
  }
  write_json(config.output_dir / "summary.json", simulation_summary(config, results));
  write_manifest(config);
  return results;
}

// ---- qini -------------------------------------------------------------------

TrainHoldoutSplit split_train_holdout(std::span<const LabeledExample> data, double holdout_fraction,
                                      std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw DomainError("holdout_fraction must lie in (0, 1)");
  Rng rng(seed);
  std::vector<std::uint8_t> in_holdout(data.size(), 0);
  for (Treatment arm : {Treatment::control, Treatment::treated}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i)
      if (data[i].arm == arm) rows.push_back(i);
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    const auto k = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < k; ++i) in_holdout[rows[i]] = 1;
  }
  TrainHoldoutSplit split;
  for (std::size_t i = 0; i < data.size(); ++i) (in_holdout[i] ? split.holdout : split.train).push_back(data[i]);
  return split;
}

double percentile95(std::vector<double> values) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

std::vector<double> permutation_null(std::span<const ScoredIndividual> scored, std::size_t bins,
                                     std::size_t permutations, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> scores(scored.size());
  std::transform(scored.begin(), scored.end(), scores.begin(), [](const ScoredIndividual& s) { return s.score; });
  std::vector<ScoredIndividual> shuffled(scored.begin(), scored.end());
  std::vector<double> areas;
  areas.reserve(permutations);
  for (std::size_t p = 0; p < permutations; ++p) {
    for (std::size_t i = scores.size(); i > 1; --i) std::swap(scores[i - 1], scores[rng.below(i)]);
    for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i].score = scores[i];
    const auto curve = qini_curve(shuffled, bins);
    const auto line = random_selection_line(curve.back().q, bins);
    areas.push_back(qini_area(q_values(curve), line));
  }
  return areas;
}

QiniEvaluation evaluate_qini(std::span<const LabeledExample> data, const QiniSettings& settings, std::uint64_t seed) {
  auto split = split_train_holdout(data, settings.holdout_fraction, mix_seed(seed, 0));
  std::vector<ScoredIndividual> scored;
  scored.reserve(split.holdout.size());
  if (settings.estimator == EstimatorKind::uplift_forest) {
    const auto model = fit_forest(split.train, settings.forest, mix_seed(seed, 1));
    for (const auto& e : split.holdout) scored.push_back({predict_uplift(model, e.x), e.arm, e.y});
  } else {
    const auto model = TwoModelEstimator::fit(split.train, settings.forest, mix_seed(seed, 1));
    for (const auto& e : split.holdout) scored.push_back({model.predict(e.x), e.arm, e.y});
  }

  QiniEvaluation out;
  out.n_train = split.train.size();
  out.n_holdout = split.holdout.size();
  out.curve = qini_curve(scored, settings.bins);
  out.random_line = random_selection_line(out.curve.back().q, settings.bins);
  out.area = qini_area(q_values(out.curve), out.random_line);
  if (settings.permutations > 0) {
    out.null_areas = permutation_null(scored, settings.bins, settings.permutations, mix_seed(seed, 2));
    out.null_p95 = percentile95(out.null_areas);
  }
  return out;
}

json qini_summary(const ExperimentConfig& config, const QiniResults& results) {
  json arms = json::object();
  for (std::size_t i = 0; i < results.arms.size(); ++i) {
    const auto& e = results.evaluations[i];
    const std::string name(to_string(results.arms[i]));
    arms[name] = {{"csv", "qini_" + name + ".csv"},
                  {"final_q", e.curve.back().q},
                  {"qini_area", e.area},
                  {"null_p95", e.null_p95},
                  {"exceeds_null_p95", !e.null_areas.empty() && e.area > e.null_p95},
                  {"n_train", e.n_train},
                  {"n_holdout", e.n_holdout}};
  }
  return {{"kind", "qini"},
          {"version", kVersion},
          {"seed", config.seeds.front()},
          {"response", to_string(config.qini.response)},
          {"bins", config.qini.bins},
          {"arms", arms}};
}

QiniResults run_qini(const ExperimentConfig& config) {
  config.validate();
  if (config.kind != ExperimentKind::qini) throw ConfigError("not a qini experiment");
  QiniResults results;
  std::filesystem::create_directories(config.output_dir);
  for (HillstromArm arm : config.qini.arms) {
    const auto data = load_hillstrom(config.qini.dataset, config.qini.response, arm);
    results.arms.push_back(arm);
    results.evaluations.push_back(evaluate_qini(data.examples, config.qini, config.seeds.front()));
    const auto& e = results.evaluations.back();
    std::ostringstream csv;
    write_qini_csv(csv, e.curve, e.random_line);
    write_text(config.output_dir / ("qini_" + std::string(to_string(arm)) + ".csv"), csv.str());
  }
  write_json(config.output_dir / "summary.json", qini_summary(config, results));
  write_manifest(config);
  return results;
}

}  // namespace ucmab

// ucmab: run simulated bandit experiments and qini evaluations from a JSON config.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

#include "ucmab/errors.hpp"
#include "ucmab/experiment.hpp"

namespace {

enum Exit { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir;
  std::size_t jobs = 1;
};

ucmab::ExperimentConfig prepare(const Options& opt, std::optional<ucmab::ExperimentKind> expected) {
  auto config = ucmab::load_config(opt.config_path);
  if (expected && config.kind != *expected)
    throw ucmab::ConfigError("config kind does not match the subcommand");
  if (opt.seed_override) config.seeds = {*opt.seed_override};
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  config.validate();
  return config;
}

int run(const std::string& command, const Options& opt) {
  try {
    if (command == "validate") {
      const auto config = prepare(opt, std::nullopt);
      std::cout << "ok: " << (config.kind == ucmab::ExperimentKind::simulate ? "simulate" : "qini") << " config, "
                << config.seeds.size() << " seed(s)\n";
      return kOk;
    }
    if (command == "simulate") {
      const auto config = prepare(opt, ucmab::ExperimentKind::simulate);
      const auto results = ucmab::run_simulate(config, opt.jobs);
      const auto summary = ucmab::simulation_summary(config, results);
      for (const auto& [name, entry] : summary["policies"].items())
        std::cout << name << " mean final-window regret " << entry["mean_final_window_regret"].get<double>() << "\n";
      std::cout << "results written to " << config.output_dir.string() << "\n";
      return kOk;
    }
    const auto config = prepare(opt, ucmab::ExperimentKind::qini);
    const auto results = ucmab::run_qini(config);
    for (std::size_t i = 0; i < results.arms.size(); ++i) {
      const auto& e = results.evaluations[i];
      std::cout << ucmab::to_string(results.arms[i]) << " qini_area " << e.area << " null_p95 " << e.null_p95 << "\n";
    }
    std::cout << "results written to " << config.output_dir.string() << "\n";
    return kOk;
  } catch (const ucmab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ucmab::SpecificationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplifted contextual bandit experiments"};
  app.set_version_flag("--version", std::string(ucmab::kVersion));
  app.require_subcommand(1);

  Options opt;
  std::string command;
  for (const char* name : {"simulate", "qini", "validate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("config", opt.config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed-override", opt.seed_override, "run a single seed instead of the configured list");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--jobs", opt.jobs, "episodes run in parallel")->check(CLI::PositiveNumber);
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }
  return run(command, opt);
}

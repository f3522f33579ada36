#include <CLI11.hpp>
#include <iostream>

#include "metaising/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"metaising: critical droplets, exact landscapes and kinetic Monte Carlo"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
  bool strict = false;
  std::optional<std::string> out_dir;

  const std::pair<const char*, const char*> modes[] = {
      {"theory", "critical geometry, Gamma and 1/K in closed form"},
      {"enumerate", "list protocritical and critical configurations"},
      {"oracle", "brute-force landscape on L <= 4"},
      {"simulate", "KMC transition times from all minus to all plus"},
      {"capacity", "Dirichlet-form prefactor on the brute-force landscape"},
      {"spectrum", "spectral gap and exact mean hitting time per beta"},
      {"fit", "fit log mean tau against beta"}};
  for (const auto& [mode, help] : modes) {
    auto* sub = app.add_subcommand(mode, help);
    sub->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--budget", budget, "event budget");
    sub->add_flag("--strict", strict, "abort when an assumption clause fails");
    sub->add_option("--out-dir", out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : metaising::kExitConfig;
  }

  try {
    metaising::ExperimentConfig config = metaising::load_config(config_path);
    config.mode = app.get_subcommands().front()->get_name();
    if (seed) config.seed = *seed;
    if (budget) config.budget = *budget;
    if (strict) config.strict = true;
    if (out_dir) config.out_dir = *out_dir;
    config = metaising::parse_config(metaising::config_to_json(config));
    return metaising::run_experiment(config, std::cerr);
  } catch (const metaising::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return metaising::kExitConfig;
  }
}

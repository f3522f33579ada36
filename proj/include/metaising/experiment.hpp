#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaising/energy.hpp"
#include "metaising/kmc.hpp"

namespace metaising {

constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssumptionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitAssumption = 3, kExitBudget = 4 };

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ModelParams params;
  int side = 0;
  std::string mode;  // theory | enumerate | oracle | simulate | capacity | spectrum | fit
  std::vector<double> betas;
  std::size_t replicas = 100;
  std::uint64_t seed = 1;
  double budget = 1e9;
  bool strict = false;
  std::string out_dir = ".";
  Sampler sampler = Sampler::kTree;
  std::string fit_input;  // CSV with beta and mean_tau columns (fit mode)
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

nlohmann::json params_to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::json& j);

struct FitResult {
  std::size_t n = 0;
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double intercept_se = 0;
  double ci_low = 0;  // 95% interval on the slope
  double ci_high = 0;
  std::optional<double> gamma_theory;
  bool mismatch = false;  // |slope - gamma| / gamma > 0.05
};

/// Least squares of log(mean tau) on beta.
FitResult fit_gamma(const std::vector<double>& betas, const std::vector<double>& mean_taus,
                    std::optional<double> gamma_theory = std::nullopt);

/// Reads `beta` and `mean_tau` columns from a CSV file.
std::pair<std::vector<double>, std::vector<double>> read_fit_csv(const std::string& path);

/// Shortest round-trip decimal form, used for every number written to CSV.
std::string format_number(double v);

/// Runs one experiment, writing report.json and CSV tables under out_dir.
/// Returns an ExitCode; diagnostics go to `log`.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

}  // namespace metaising

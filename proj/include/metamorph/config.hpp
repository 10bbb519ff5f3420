#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "metamorph/ch2.hpp"
#include "metamorph/fda.hpp"
#include "metamorph/landmark.hpp"
#include "metamorph/matching.hpp"

namespace metamorph {

enum class Scenario {
  landmark_sde,
  ch2_sde,
  landmark_match,
  fda_generate,
  convergence_study,
};

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario scenario);

struct IntegratorSpec {
  Method method = Method::heun;
  double T = 1.0;
  int steps = 1;
};

struct EnsembleBlock {
  std::uint64_t base_seed = 0;
  int realizations = 1;
  bool store_trajectories = false;
  double failure_threshold = 0.01;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<double> times;  // defaults to {T}
  bool csv = true;
  bool json = true;
};

struct LandmarkScenarioCfg {
  LandmarkSystem system;
  LandmarkState initial;
  TracerCloud tracers;  // may be empty
};

struct Ch2ScenarioCfg {
  Grid1D grid;
  Ch2State initial;
  Ch2NoiseSpec noise;
};

struct MatchScenarioCfg {
  MatchProblem problem;
};

struct FdaScenarioCfg {
  FdaSpec spec;
};

struct ConvergenceScenarioCfg {
  LandmarkSystem system;
  LandmarkState initial;
  std::vector<int> steps_ladder;  // dyadic, >= 4 levels
  int paths = 100;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::landmark_sde;
  IntegratorSpec integrator;
  EnsembleBlock ensemble;
  OutputSpec output;

  std::optional<LandmarkScenarioCfg> landmark;
  std::optional<Ch2ScenarioCfg> ch2;
  std::optional<MatchScenarioCfg> match;
  std::optional<FdaScenarioCfg> fda;
  std::optional<ConvergenceScenarioCfg> convergence;

  std::vector<std::string> warnings;  // e.g. time-step guideline violations
  nlohmann::json raw;                 // echoed into the manifest
};

// Throws ConfigError with a field path on any violation.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// JSON Schema describing the config format.
std::string config_schema_json();

}  // namespace metamorph

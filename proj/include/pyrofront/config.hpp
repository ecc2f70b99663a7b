#ifndef PYROFRONT_CONFIG_HPP_
#define PYROFRONT_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace pyrofront {

enum class WindPattern { kLinearX, kLinearY, kRadial };
enum class RunMode { kObservation, kBelief };
enum class Scenario { kStaticBatch, kDynamic };

using ErrorMatrix = std::array<std::array<double, 3>, 3>;

struct EnvConfig {
  int grid_size = 16;
  int num_veg_patches = 5;
  int patch_radius_min = 3;
  int patch_radius_max = 6;
  int num_ignitions = 10;
  double sigma_spread = 1.0;  // cells
  double eps_rad = 3.0;       // cells; sigma_rad = eps_rad / 3
  double m_phi = 1.0;
  WindPattern wind_pattern = WindPattern::kLinearX;
  double wind_max = 100.0;       // cap on |A|
  double wind_amplitude = 80.0;  // peak of the radial-basis bumps around ignitions
  double wind_variation = 20.0;  // amplitude of the sinusoidal magnitude term
  double period_magnitude = 20.0;
  double period_phase = 80.0;
  double base_fuel = 1.0;
  double base_density = 1.0;
  int neighborhood_radius = 0;  // 0 -> ceil(3 * sigma_spread)
  double fuel_noise = 0.02;     // std as a fraction of base_density
  double burnout_fuel = 0.05;   // a burning cell with fuel <= burnout_fuel * base_fuel burns out
  int static_warmup_steps = 15;

  int effective_radius() const;
};

struct AgentConfig {
  int fov = 5;
  double steer_limit_deg = 180.0;
  double battery_init = 100.0;
  double battery_threshold = 20.0;
  double hover_cost = 0.1;
  double move_cost = 0.1;
  double move_hover_ratio = 2.0;
  ErrorMatrix classification_error = {{{0.95, 0.025, 0.025}, {0.025, 0.95, 0.025}, {0.025, 0.025, 0.95}}};
  int start_x = 0;
  int start_y = 0;

  double steer_limit_rad() const;
};

struct RewardConfig {
  double alpha_det = 10.0;
  double alpha_mon = 10.0;
  double alpha_mvm = 1.0;
  double alpha_p = 1.0;
  double alpha_brn = 1.0;
  double alpha_bel = 40.0;
  double r_btr = -100.0;
  double r_brn = -200.0;
  int burnout_limit = 10;
};

struct BeliefConfig {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  bool test_mode = false;  // enables the oracle update against the hidden state
};

struct TrainConfig {
  double gamma = 0.9;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int target_sync = 100;
  double eps_start = 1.0;
  double eps_end = 0.1;
  double eps_decay_fraction = 0.5;
  int buffer_capacity = 10000;
  bool reduced_net = true;
  int train_period = 4;
  double grad_clip = 10.0;
  double reward_scale = 0.01;
};

struct ExperimentConfig {
  EnvConfig env;
  AgentConfig agent;
  RewardConfig reward;
  BeliefConfig belief;
  TrainConfig train;
  RunMode mode = RunMode::kBelief;
  Scenario scenario = Scenario::kDynamic;
  int num_episodes = 20;
  int max_iterations = 500;
  bool rerandomize_ignitions = false;
  int snapshot_period = 0;  // 0 -> only initial and final maps per episode
  std::uint64_t seed = 1;
  std::string output_dir = "runs";
};

// Each validator throws Error(kConfig) naming the violated invariant.
void validate(const EnvConfig& cfg);
void validate(const AgentConfig& cfg, int grid_size);
void validate(const RewardConfig& cfg);
void validate(const TrainConfig& cfg);
void validate(const ExperimentConfig& cfg);

// JSON text with every field of the resolved configuration. output_dir is not
// serialized: it names where a run goes, not what it computes.
std::string to_json(const ExperimentConfig& cfg, int indent = 2);

// Parses a (possibly partial) config document over the defaults. Unknown keys
// are rejected with the offending key path.
ExperimentConfig config_from_json(const std::string& text);

// Applies one "dotted.key=value" override. Short aliases: grid, fov,
// episodes, seed, mode, scenario, iterations.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Loads a JSON file (empty file = defaults), applies overrides in order, then
// validates.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

std::string to_string(RunMode m);
std::string to_string(Scenario s);
std::string to_string(WindPattern p);
RunMode parse_mode(const std::string& s);
Scenario parse_scenario(const std::string& s);
WindPattern parse_wind_pattern(const std::string& s);

}  // namespace pyrofront

#endif  // PYROFRONT_CONFIG_HPP_

#include "pyrofront/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pyrofront/error.hpp"

namespace pyrofront {

using json = nlohmann::json;

NLOHMANN_JSON_SERIALIZE_ENUM(WindPattern, {{WindPattern::kLinearX, "linear_x"},
                                           {WindPattern::kLinearY, "linear_y"},
                                           {WindPattern::kRadial, "radial"}})
NLOHMANN_JSON_SERIALIZE_ENUM(RunMode, {{RunMode::kObservation, "observation"}, {RunMode::kBelief, "belief"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Scenario, {{Scenario::kStaticBatch, "static"}, {Scenario::kDynamic, "dynamic"}})

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EnvConfig, grid_size, num_veg_patches, patch_radius_min, patch_radius_max,
                                   num_ignitions, sigma_spread, eps_rad, m_phi, wind_pattern, wind_max,
                                   wind_amplitude, wind_variation, period_magnitude, period_phase, base_fuel,
                                   base_density, neighborhood_radius, fuel_noise, burnout_fuel, static_warmup_steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AgentConfig, fov, steer_limit_deg, battery_init, battery_threshold, hover_cost,
                                   move_cost, move_hover_ratio, classification_error, start_x, start_y)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RewardConfig, alpha_det, alpha_mon, alpha_mvm, alpha_p, alpha_brn, alpha_bel,
                                   r_btr, r_brn, burnout_limit)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BeliefConfig, alpha0, beta0, test_mode)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainConfig, gamma, learning_rate, batch_size, target_sync, eps_start, eps_end,
                                   eps_decay_fraction, buffer_capacity, reduced_net, train_period, grad_clip,
                                   reward_scale)

namespace {

json experiment_to_json(const ExperimentConfig& c) {
  return json{{"env", c.env},
              {"agent", c.agent},
              {"reward", c.reward},
              {"belief", c.belief},
              {"train", c.train},
              {"mode", c.mode},
              {"scenario", c.scenario},
              {"num_episodes", c.num_episodes},
              {"max_iterations", c.max_iterations},
              {"rerandomize_ignitions", c.rerandomize_ignitions},
              {"snapshot_period", c.snapshot_period},
              {"seed", c.seed}};
}

ExperimentConfig experiment_from_json(const json& j) {
  ExperimentConfig c;
  c.env = j.at("env").get<EnvConfig>();
  c.agent = j.at("agent").get<AgentConfig>();
  c.reward = j.at("reward").get<RewardConfig>();
  c.belief = j.at("belief").get<BeliefConfig>();
  c.train = j.at("train").get<TrainConfig>();
  c.mode = j.at("mode").get<RunMode>();
  c.scenario = j.at("scenario").get<Scenario>();
  c.num_episodes = j.at("num_episodes").get<int>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.rerandomize_ignitions = j.at("rerandomize_ignitions").get<bool>();
  c.snapshot_period = j.at("snapshot_period").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

void check_known_keys(const json& user, const json& reference, const std::string& prefix) {
  if (!user.is_object()) {
    fail(ErrorCode::kConfig, prefix.empty() ? "config document must be a JSON object"
                                            : "config key '" + prefix + "' must be an object");
  }
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!reference.contains(key)) fail(ErrorCode::kConfig, "unknown config key '" + path + "'");
    if (reference.at(key).is_object()) check_known_keys(value, reference.at(key), path);
  }
}

// Enum values are rejected by nlohmann's enum mapping only silently (it falls
// back to the first entry), so closed enums are checked by name here.
void check_enum_values(const json& merged) {
  auto check = [](const json& v, std::initializer_list<const char*> allowed, const std::string& key) {
    if (!v.is_string()) fail(ErrorCode::kConfig, "config key '" + key + "' must be a string");
    for (const char* a : allowed)
      if (v.get<std::string>() == a) return;
    fail(ErrorCode::kConfig, "config key '" + key + "' has invalid value '" + v.get<std::string>() + "'");
  };
  check(merged.at("mode"), {"observation", "belief"}, "mode");
  check(merged.at("scenario"), {"static", "dynamic"}, "scenario");
  check(merged.at("env").at("wind_pattern"), {"linear_x", "linear_y", "radial"}, "env.wind_pattern");
}

ExperimentConfig merge_over(const ExperimentConfig& base, json user) {
  std::string output_dir = base.output_dir;
  if (user.is_object() && user.contains("output_dir")) {
    if (!user["output_dir"].is_string()) fail(ErrorCode::kConfig, "config key 'output_dir' must be a string");
    output_dir = user["output_dir"].get<std::string>();
    user.erase("output_dir");
  }
  if (user.is_object() && user.contains("scenario") && user["scenario"] == "static_batch") user["scenario"] = "static";
  const json reference = experiment_to_json(base);
  check_known_keys(user, reference, "");
  json merged = reference;
  merged.merge_patch(user);
  check_enum_values(merged);
  try {
    ExperimentConfig c = experiment_from_json(merged);
    c.output_dir = output_dir;
    return c;
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("config type error: ") + e.what());
  }
}

void require(bool ok, const std::string& invariant) {
  if (!ok) fail(ErrorCode::kConfig, "config invariant violated: " + invariant);
}

}  // namespace

int EnvConfig::effective_radius() const {
  if (neighborhood_radius > 0) return neighborhood_radius;
  return std::max(1, static_cast<int>(std::ceil(3.0 * sigma_spread - 1e-12)));
}

double AgentConfig::steer_limit_rad() const { return steer_limit_deg * std::numbers::pi / 180.0; }

void validate(const EnvConfig& c) {
  require(c.grid_size >= 1, "grid_size >= 1");
  require(c.num_veg_patches >= 1, "num_veg_patches >= 1");
  require(c.patch_radius_min >= 0 && c.patch_radius_min <= c.patch_radius_max,
          "0 <= patch_radius_min <= patch_radius_max");
  require(c.num_ignitions >= 0, "num_ignitions >= 0");
  require(c.sigma_spread > 0.0, "sigma_spread > 0");
  require(c.eps_rad > 0.0, "eps_rad > 0");
  require(c.m_phi >= 0.5, "m_phi >= 1/2");
  require(c.wind_max > 0.0, "wind_max > 0");
  require(c.wind_amplitude >= 0.0 && c.wind_variation >= 0.0, "wind amplitudes >= 0");
  require(c.period_magnitude > 0.0 && c.period_phase > 0.0, "wind periods > 0");
  require(c.base_fuel > 0.0 && c.base_density > 0.0, "base_fuel > 0 and base_density > 0");
  require(c.neighborhood_radius >= 0, "neighborhood_radius >= 0 (0 selects ceil(3 sigma_spread))");
  require(c.effective_radius() >= 1, "eps_r >= 1");
  require(c.fuel_noise >= 0.0, "fuel_noise >= 0");
  require(c.burnout_fuel > 0.0 && c.burnout_fuel < 1.0, "0 < burnout_fuel < 1");
  require(c.static_warmup_steps >= 0, "static_warmup_steps >= 0");
}

void validate(const AgentConfig& c, int grid_size) {
  require(c.fov >= 1 && c.fov % 2 == 1, "fov odd");
  require(c.fov <= grid_size, "fov <= grid_size");
  require(c.steer_limit_deg > 0.0 && c.steer_limit_deg <= 360.0, "0 < steer_limit_deg <= 360");
  require(c.battery_init > 0.0 && c.battery_init <= 100.0, "0 < battery_init <= 100");
  require(c.battery_threshold >= 0.0 && c.battery_threshold <= 100.0, "0 <= battery_threshold <= 100");
  require(c.hover_cost >= 0.0 && c.move_cost >= 0.0 && c.move_hover_ratio >= 0.0, "battery costs >= 0");
  for (const auto& row : c.classification_error) {
    double sum = 0.0;
    for (double v : row) {
      require(v >= 0.0, "classification_error entries >= 0");
      sum += v;
    }
    require(std::abs(sum - 1.0) < 1e-9, "classification_error rows sum to 1");
  }
  require(c.start_x >= 0 && c.start_y >= 0 && c.start_x < grid_size && c.start_y < grid_size,
          "start position inside grid");
}

void validate(const RewardConfig& c) { require(c.burnout_limit >= 1, "burnout_limit >= 1"); }

void validate(const TrainConfig& c) {
  require(c.gamma >= 0.0 && c.gamma < 1.0, "gamma in [0, 1)");
  require(c.learning_rate >= 0.0, "learning_rate >= 0");
  require(c.batch_size >= 1, "batch_size >= 1");
  require(c.target_sync >= 1, "target_sync >= 1");
  require(c.eps_start >= 0.0 && c.eps_start <= 1.0 && c.eps_end >= 0.0 && c.eps_end <= 1.0, "epsilon in [0, 1]");
  require(c.eps_decay_fraction > 0.0 && c.eps_decay_fraction <= 1.0, "0 < eps_decay_fraction <= 1");
  require(c.buffer_capacity >= c.batch_size, "buffer_capacity >= batch_size");
  require(c.train_period >= 1, "train_period >= 1");
  require(c.grad_clip >= 0.0, "grad_clip >= 0 (0 disables clipping)");
  require(c.reward_scale > 0.0, "reward_scale > 0");
}

void validate(const ExperimentConfig& c) {
  validate(c.env);
  validate(c.agent, c.env.grid_size);
  validate(c.reward);
  validate(c.train);
  require(c.belief.alpha0 > 0.0 && c.belief.beta0 > 0.0, "alpha0 > 0 and beta0 > 0");
  require(c.num_episodes >= 1, "num_episodes >= 1");
  require(c.max_iterations >= 1, "max_iterations >= 1");
  require(c.snapshot_period >= 0, "snapshot_period >= 0");
}

std::string to_json(const ExperimentConfig& cfg, int indent) { return experiment_to_json(cfg).dump(indent); }

ExperimentConfig config_from_json(const std::string& text) {
  json user;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    user = json::object();
  } else {
    try {
      user = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kConfig, std::string("config parse error: ") + e.what());
    }
  }
  return merge_over(ExperimentConfig{}, user);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  static const std::map<std::string, std::string> aliases = {
      {"grid", "env.grid_size"},   {"fov", "agent.fov"}, {"episodes", "num_episodes"},
      {"iterations", "max_iterations"}, {"seed", "seed"}, {"mode", "mode"},
      {"scenario", "scenario"}};

  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCode::kConfig, "override must be key=value: '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  if (auto it = aliases.find(key); it != aliases.end()) key = it->second;

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json patch = json::object();
  json* node = &patch;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
  (*node)[parts.back()] = value;
  cfg = merge_over(cfg, patch);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::kIo, "cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = config_from_json(buf.str());
  }
  for (const auto& o : overrides) apply_override(cfg, o);
  validate(cfg);
  return cfg;
}

std::string to_string(RunMode m) { return json(m).get<std::string>(); }
std::string to_string(Scenario s) { return json(s).get<std::string>(); }
std::string to_string(WindPattern p) { return json(p).get<std::string>(); }

RunMode parse_mode(const std::string& s) {
  if (s == "observation") return RunMode::kObservation;
  if (s == "belief") return RunMode::kBelief;
  fail(ErrorCode::kConfig, "invalid mode '" + s + "' (expected observation|belief)");
}

Scenario parse_scenario(const std::string& s) {
  if (s == "static" || s == "static_batch") return Scenario::kStaticBatch;
  if (s == "dynamic") return Scenario::kDynamic;
  fail(ErrorCode::kConfig, "invalid scenario '" + s + "' (expected static|dynamic)");
}

WindPattern parse_wind_pattern(const std::string& s) {
  if (s == "linear_x") return WindPattern::kLinearX;
  if (s == "linear_y") return WindPattern::kLinearY;
  if (s == "radial") return WindPattern::kRadial;
  fail(ErrorCode::kConfig, "invalid wind pattern '" + s + "'");
}

}  // namespace pyrofront

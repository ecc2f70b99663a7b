#include "pyrofront/mission.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pyrofront/error.hpp"
#include "pyrofront/io.hpp"

namespace pyrofront {

namespace {

constexpr std::array<const char*, 4> kCauseNames = {"max_iterations", "battery_depleted", "burnout_limit",
                                                    "scan_complete"};

std::vector<int> stripe_centers(int n, int fov) {
  const int half = fov / 2;
  std::vector<int> out;
  for (int c = half;; c += fov) {
    const int v = std::min(c, n - 1 - half);
    if (out.empty() || out.back() != v) out.push_back(v);
    if (c + half >= n - 1) break;
  }
  return out;
}

std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

}  // namespace

std::string to_string(TerminationCause c) { return kCauseNames[static_cast<int>(c)]; }

TerminationCause parse_termination(const std::string& s) {
  for (std::size_t i = 0; i < kCauseNames.size(); ++i)
    if (s == kCauseNames[i]) return static_cast<TerminationCause>(i);
  fail(ErrorCode::kInvalidArgument, "unknown termination cause '" + s + "'");
}

std::string to_string(MissionPhase p) { return p == MissionPhase::kScan ? "scan" : "track"; }

std::vector<Cell> scan_path(int grid_size, int fov, Cell start) {
  if (fov < 1 || fov > grid_size) fail(ErrorCode::kInvalidArgument, "scan_path: need 1 <= fov <= grid size");
  std::vector<int> rows = stripe_centers(grid_size, fov);
  std::vector<int> cols = rows;
  if (std::abs(rows.back() - start.y) < std::abs(rows.front() - start.y)) std::reverse(rows.begin(), rows.end());
  if (std::abs(cols.back() - start.x) < std::abs(cols.front() - start.x)) std::reverse(cols.begin(), cols.end());

  std::vector<Cell> path;
  for (int y : rows) {
    for (int x : cols) path.push_back({x, y});
    std::reverse(cols.begin(), cols.end());
  }
  return path;
}

Action step_toward(Cell from, Cell to) {
  Action best = Action::kHover;
  double best_d = cell_distance2(from, to);
  bool best_cardinal = true;
  for (int i = 0; i < 8; ++i) {
    const Action a = action_from_index(i);
    const Cell d = action_delta(a);
    const double dist = cell_distance2({from.x + d.x, from.y + d.y}, to);
    const bool cardinal = i % 2 == 0;
    if (dist < best_d || (dist == best_d && best != Action::kHover && cardinal && !best_cardinal)) {
      best = a;
      best_d = dist;
      best_cardinal = cardinal;
    }
  }
  return best;
}

ScanPilot::ScanPilot(std::vector<Cell> path) : path_(path.begin(), path.end()) {}

std::optional<Action> ScanPilot::next(Cell pos) {
  while (!path_.empty() && path_.front() == pos) path_.pop_front();
  if (path_.empty()) return std::nullopt;
  return step_toward(pos, path_.front());
}

AgentView::AgentView(RunMode mode, const EnvState& env, const ExperimentConfig& cfg)
    : mode_(mode),
      t_max_(cfg.max_iterations),
      model_{cfg.env.sigma_spread, cfg.env.effective_radius()},
      cmap_(env.n) {
  if (mode_ == RunMode::kBelief) {
    belief_ = init_belief(env.density, env.veg_type, cfg.belief.alpha0, cfg.belief.beta0);
    estimator_ = SpreadEstimator(env.density, env.veg_type, cfg.env);
  }
}

void AgentView::initialize(const Observation& obs) {
  cmap_.record(obs);
  cmap_.refresh(obs.t, t_max_);
  if (mode_ == RunMode::kBelief) {
    correct_belief(belief_, obs);
    estimator_.observe(obs);
  }
}

double AgentView::update(const Observation& obs, double alpha_bel) {
  double info = 0.0;
  if (mode_ == RunMode::kBelief) {
    estimator_.advance(belief_, obs.t, t_max_);
    predict_belief(belief_, estimator_.wind_mag(), estimator_.wind_phase(), estimator_.fuel_fraction(), model_);
    std::vector<double> b;
    std::vector<Ignition> z;
    b.reserve(obs.readings.size());
    z.reserve(obs.readings.size());
    for (const auto& r : obs.readings) {
      b.push_back(belief_.b[r.cell]);
      z.push_back(r.reading);
    }
    info = info_reward(b, z, alpha_bel);
    correct_belief(belief_, obs);
    estimator_.observe(obs);
  }
  cmap_.record(obs);
  cmap_.refresh(obs.t, t_max_);
  return info;
}

std::vector<double> AgentView::input(int t) const {
  if (mode_ == RunMode::kBelief) {
    auto d = belief_.b.data();
    return {d.begin(), d.end()};
  }
  const Grid<double> z = certainty_weighted_observation(cmap_, t, t_max_);
  auto d = z.data();
  return {d.begin(), d.end()};
}

nn::NetConfig net_config_for(const ExperimentConfig& cfg) {
  return cfg.train.reduced_net ? nn::NetConfig::reduced(cfg.env.grid_size) : nn::NetConfig::full(cfg.env.grid_size);
}

EpisodeResult run_episode(EnvState& env, Rng& env_rng, const ExperimentConfig& cfg, DqnTrainer* trainer,
                          const EpisodeOptions& opts) {
  const bool scan = opts.phase == MissionPhase::kScan;
  if (!scan && !opts.scripted && trainer == nullptr)
    fail(ErrorCode::kInvalidArgument, "run_episode: tracking needs a network or a scripted policy");

  Rng obs_rng(opts.obs_seed);
  Rng policy_rng(opts.policy_seed);
  Rng train_rng(opts.train_seed);
  const int n = env.n;
  const AgentConfig& agent = cfg.agent;

  EpisodeResult result;
  result.index = opts.index;
  result.phase = opts.phase;
  result.epsilon = opts.epsilon;

  UavState uav = initial_uav(agent);
  AgentView view(cfg.mode, env, cfg);
  CoverageTracker coverage(n);
  ScanPilot pilot;
  if (scan) pilot = ScanPilot(scan_path(n, agent.fov, uav.pos));

  Observation obs = observe(env, uav, agent, obs_rng);
  view.initialize(obs);
  coverage.record_truth(env);
  coverage.record_observation(obs, env);
  if (opts.on_step) opts.on_step(-1, false, env, view);

  std::vector<double> input = view.input(env.t);
  UavFeatures features = encode_uav(uav, n);
  int burnout_steps = 0;

  for (int step = 0; step < cfg.max_iterations; ++step) {
    const ActionSet valid = valid_actions(uav, n, agent.steer_limit_rad());
    Action action = Action::kHover;
    if (scan) {
      action = pilot.next(uav.pos).value_or(Action::kHover);
    } else if (opts.scripted) {
      action = opts.scripted(PolicyContext{uav, valid, input, step, env});
      if (!valid.contains(action)) fail(ErrorCode::kState, "scripted policy chose an invalid action");
    } else {
      action = select_action(trainer->online(), input, features, valid, opts.epsilon, policy_rng);
    }

    const WindSample wind{env.wind_mag[uav.pos], env.wind_phase[uav.pos]};
    const double energy = movement_cost(action, wind.phase, agent);
    const UavState next_uav = apply_action(uav, action, wind, agent);

    env_step(env, cfg.env, env_rng);
    obs = observe(env, next_uav, agent, obs_rng);
    const RewardConfig rc = opts.schedule(cfg.reward, opts.phase, step);
    const double info = view.update(obs, rc.alpha_bel);
    coverage.record_truth(env);
    coverage.record_observation(obs, env);

    StepLog log;
    log.step = step;
    log.t = env.t;
    log.uav = next_uav;
    log.action = action;
    log.reward.objective = objective_reward(obs, next_uav, rc);
    log.reward.constraint = constraint_reward(next_uav, energy, env, rc, agent);
    log.reward.info = info;
    log.total = total_reward(log.reward);
    log.mia = step_mia(env, next_uav.pos, agent.fov);
    log.detected = coverage.detected();
    log.ever_ignited = coverage.ever_ignited();
    if (env.ignition[next_uav.pos] == Ignition::kBurning) {
      ++burnout_steps;
      log.burn_penalty = rc.alpha_brn * rc.r_brn;
    }
    log.burnout_steps = burnout_steps;

    std::optional<TerminationCause> cause;
    bool terminal = false;
    if (next_uav.battery <= 0.0) {
      cause = TerminationCause::kBatteryDepleted;
      terminal = true;
    } else if (!scan && burnout_steps >= rc.burnout_limit) {
      cause = TerminationCause::kBurnoutLimit;
      terminal = true;
    } else if (scan && pilot.next(next_uav.pos) == std::nullopt) {
      cause = TerminationCause::kScanComplete;
    } else if (step + 1 == cfg.max_iterations) {
      cause = TerminationCause::kMaxIterations;
    }

    std::vector<double> next_input = view.input(env.t);
    const UavFeatures next_features = encode_uav(next_uav, n);
    if (trainer != nullptr && opts.train) {
      Transition tr;
      tr.map = to_float(input);
      tr.uav = features;
      tr.action = index_of(action);
      tr.reward = log.total * cfg.train.reward_scale;
      tr.next_map = to_float(next_input);
      tr.next_uav = next_features;
      tr.done = terminal;
      trainer->push(std::move(tr));
      if (step % cfg.train.train_period == 0) log.loss = trainer->maybe_train(train_rng);
    }

    result.steps.push_back(log);
    if (opts.on_step) opts.on_step(step, cause.has_value(), env, view);
    input = std::move(next_input);
    features = next_features;
    uav = next_uav;
    if (cause) {
      result.cause = *cause;
      break;
    }
  }

  result.coverage = coverage.ratio();
  std::vector<double> mias;
  mias.reserve(result.steps.size());
  for (const auto& s : result.steps) mias.push_back(s.mia);
  result.time_average_mia = time_average(mias);
  result.observed_fraction = view.certainty_map().observed_fraction();
  result.final_t = env.t;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& run_dir, bool scan_only) {
  namespace fs = std::filesystem;
  ExperimentConfig rc = cfg;
  if (scan_only) rc.num_episodes = 1;
  validate(rc);

  fs::create_directories(run_dir / "episodes");
  fs::create_directories(run_dir / "maps");
  fs::create_directories(run_dir / "checkpoints");
  const std::string config_text = to_json(rc);
  io::write_text(run_dir / "config.json", config_text + "\n");
  const std::uint64_t config_hash = fnv1a(config_text.data(), config_text.size());

  ExperimentResult out;
  out.run_dir = run_dir;
  std::vector<io::EpisodeMeta> metas;
  std::vector<std::vector<StepLog>> logs;

  auto flush = [&](bool complete) {
    std::string loss = "episode,step,loss\n";
    for (std::size_t e = 0; e < logs.size(); ++e)
      for (const auto& s : logs[e])
        if (s.loss >= 0.0)
          loss += std::to_string(metas[e].index) + "," + std::to_string(s.step) + "," + io::format_double(s.loss) +
                  "\n";
    io::write_text(run_dir / "loss.csv", loss);
    io::write_summary(run_dir, rc, metas, logs, complete);
  };

  try {
    const EnvState initial = init_environment(rc.env, derive_seed(rc.seed, 1, 0));
    DqnTrainer trainer(rc.train, net_config_for(rc), derive_seed(rc.seed, 2, 0));
    const int tracking = rc.num_episodes - 1;

    for (int k = 1; k <= rc.num_episodes; ++k) {
      EnvState env = rc.rerandomize_ignitions && k > 1 ? init_environment(rc.env, derive_seed(rc.seed, 1, k)) : initial;
      Rng progression(derive_seed(rc.seed, 4, k));
      prepare_scenario(env, rc.env, rc.scenario, progression);

      EpisodeOptions opts;
      opts.index = k;
      opts.phase = k == 1 ? MissionPhase::kScan : MissionPhase::kTrack;
      opts.epsilon = k == 1 ? 0.0 : epsilon_for_episode(rc.train, k - 2, tracking);
      opts.obs_seed = derive_seed(rc.seed, 5, k);
      opts.policy_seed = derive_seed(rc.seed, 6, k);
      opts.train_seed = derive_seed(rc.seed, 7, k);
      const fs::path map_dir = run_dir / "maps" / ("ep_" + std::to_string(k));
      fs::create_directories(map_dir);
      opts.on_step = [&](int step, bool last, const EnvState& e, const AgentView& v) {
        const bool periodic = rc.snapshot_period > 0 && step >= 0 && (step + 1) % rc.snapshot_period == 0;
        if (step < 0 || last || periodic) io::write_snapshot(map_dir, e, v, rc.env.wind_max);
      };

      EpisodeResult res = run_episode(env, progression, rc, &trainer, opts);
      const fs::path stem = run_dir / "episodes" / ("ep_" + std::to_string(k));
      io::write_episode_csv(stem.string() + ".csv", res.steps, rc.env.grid_size);
      const io::EpisodeMeta meta = io::meta_of(res);
      io::write_episode_json(stem.string() + ".json", meta);
      metas.push_back(meta);
      logs.push_back(res.steps);
      out.episodes.push_back(std::move(res));
    }
    io::save_checkpoint(run_dir / "checkpoints" / "final.ckpt", trainer.online(), config_hash);
  } catch (...) {
    flush(false);
    throw;
  }
  flush(true);
  out.complete = true;
  return out;
}

}  // namespace pyrofront

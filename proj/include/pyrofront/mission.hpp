#ifndef PYROFRONT_MISSION_HPP_
#define PYROFRONT_MISSION_HPP_

#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pyrofront/belief.hpp"
#include "pyrofront/config.hpp"
#include "pyrofront/metrics.hpp"
#include "pyrofront/qlearn.hpp"
#include "pyrofront/reward.hpp"
#include "pyrofront/sim.hpp"
#include "pyrofront/uav.hpp"

namespace pyrofront {

enum class TerminationCause { kMaxIterations, kBatteryDepleted, kBurnoutLimit, kScanComplete };
std::string to_string(TerminationCause c);
TerminationCause parse_termination(const std::string& s);
std::string to_string(MissionPhase p);

// Boustrophedon sweep: horizontal stripes whose centers are fov apart (the
// last one shifted inward), each traversed cell by cell, starting from the
// stripe and end nearest to `start`.
std::vector<Cell> scan_path(int grid_size, int fov, Cell start);

// Greedy one-cell step toward `target`; cardinal moves win ties.
Action step_toward(Cell from, Cell to);

// Follows a scan path waypoint by waypoint.
class ScanPilot {
 public:
  ScanPilot() = default;
  explicit ScanPilot(std::vector<Cell> path);
  // Next action for a UAV at `pos`; nullopt once every waypoint is reached.
  std::optional<Action> next(Cell pos);
  bool done() const { return path_.empty(); }

 private:
  std::deque<Cell> path_;
};

// Agent-side representation: certainty map (both modes) and belief map with
// its estimator (belief mode).
class AgentView {
 public:
  AgentView(RunMode mode, const EnvState& env, const ExperimentConfig& cfg);

  // Observation at the start of an episode.
  void initialize(const Observation& obs);
  // Advances the representation to obs.t and folds in the new observation.
  // Returns the info reward (belief mode), computed on the predicted belief
  // before the correction.
  double update(const Observation& obs, double alpha_bel);

  // Network input at time t (belief b, or certainty-weighted observation).
  std::vector<double> input(int t) const;

  RunMode mode() const { return mode_; }
  const CertaintyMap& certainty_map() const { return cmap_; }
  const BeliefMap& belief() const { return belief_; }

 private:
  RunMode mode_;
  int t_max_;
  SpreadModel model_;
  CertaintyMap cmap_;
  BeliefMap belief_;
  SpreadEstimator estimator_;
};

struct StepLog {
  int step = 0;
  int t = 0;
  UavState uav;
  Action action = Action::kHover;
  RewardParts reward;
  double total = 0.0;
  double mia = 0.0;
  int detected = 0;
  int ever_ignited = 0;
  int burnout_steps = 0;
  double burn_penalty = 0.0;  // burnout share of the constraint reward
  double loss = -1.0;
};

struct EpisodeResult {
  int index = 0;
  MissionPhase phase = MissionPhase::kTrack;
  double epsilon = 0.0;
  TerminationCause cause = TerminationCause::kMaxIterations;
  std::vector<StepLog> steps;
  double coverage = 1.0;
  double time_average_mia = 0.0;
  double observed_fraction = 0.0;
  int final_t = 0;
};

struct PolicyContext {
  const UavState& uav;
  const ActionSet& valid;
  std::span<const double> input;
  int step;
  const EnvState& env;
};
using ScriptedPolicy = std::function<Action(const PolicyContext&)>;

struct EpisodeOptions {
  int index = 1;
  MissionPhase phase = MissionPhase::kTrack;
  double epsilon = 0.0;
  bool train = true;
  ScriptedPolicy scripted;  // overrides the learned policy in tracking
  RewardSchedule schedule = constant_schedule;
  std::uint64_t obs_seed = 0;
  std::uint64_t policy_seed = 0;
  std::uint64_t train_seed = 0;
  // Called once before the first step (step = -1) and after every step;
  // `last` marks the final step of the episode.
  std::function<void(int step, bool last, const EnvState&, const AgentView&)> on_step;
};

// Runs one episode on `env` (mutated). trainer may be null when no learned
// policy or training is needed.
EpisodeResult run_episode(EnvState& env, Rng& env_rng, const ExperimentConfig& cfg, DqnTrainer* trainer,
                          const EpisodeOptions& opts);

nn::NetConfig net_config_for(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::filesystem::path run_dir;
  std::vector<EpisodeResult> episodes;
  bool complete = false;
};

// Executes one epoch (scan episode + tracking episodes) and writes config,
// episode logs, map snapshots, checkpoint, loss curve and summary under
// run_dir. `scan_only` stops after the scan episode.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& run_dir,
                                bool scan_only = false);

}  // namespace pyrofront

#endif  // PYROFRONT_MISSION_HPP_

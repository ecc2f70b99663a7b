#ifndef PYROFRONT_REWARD_HPP_
#define PYROFRONT_REWARD_HPP_

#include <optional>
#include <span>

#include "pyrofront/config.hpp"
#include "pyrofront/sim.hpp"
#include "pyrofront/uav.hpp"

namespace pyrofront {

struct RewardParts {
  double objective = 0.0;
  double constraint = 0.0;
  double info = 0.0;
};

inline constexpr double kProbabilityClamp = 1e-6;

// Distance from the UAV to the closest observed frontline cell: a cell read
// as burning with at least one observed 8-neighbour not read as burning.
// Falls back to the closest cell read as burning when the visible fire has no
// observed edge; empty when nothing in the FOV is read as burning.
std::optional<double> observed_frontline_distance(const Observation& obs, Cell uav);

double objective_reward(const Observation& obs, const UavState& uav, const RewardConfig& cfg);

// movement_energy is the battery drawn by the action this step (see
// movement_cost); it enters as a penalty.
double constraint_reward(const UavState& uav_after, double movement_energy, const EnvState& env,
                         const RewardConfig& cfg, const AgentConfig& agent);

double bernoulli_kl(double p, double q);

// Per-cell Bernoulli divergence between the burning-indicator of each reading
// and the belief over the same cells, both clamped away from {0, 1}.
double info_reward(std::span<const double> belief_fov, std::span<const Ignition> readings, double alpha_bel);

double total_reward(const RewardParts& parts);

// Coefficient schedule over the mission; the default keeps the base values.
enum class MissionPhase { kScan, kTrack };
using RewardSchedule = RewardConfig (*)(const RewardConfig& base, MissionPhase phase, int step);
RewardConfig constant_schedule(const RewardConfig& base, MissionPhase phase, int step);

}  // namespace pyrofront

#endif  // PYROFRONT_REWARD_HPP_

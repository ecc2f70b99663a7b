#include "pyrofront/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pyrofront/error.hpp"

namespace pyrofront {

std::optional<double> observed_frontline_distance(const Observation& obs, Cell uav) {
  std::map<Cell, Ignition> seen;
  for (const auto& r : obs.readings) seen[r.cell] = r.reading;

  double best_front = std::numeric_limits<double>::infinity();
  double best_any = std::numeric_limits<double>::infinity();
  for (const auto& [cell, reading] : seen) {
    if (reading != Ignition::kBurning) continue;
    const double d = cell_distance(cell, uav);
    best_any = std::min(best_any, d);
    bool edge = false;
    for (int dy = -1; dy <= 1 && !edge; ++dy) {
      for (int dx = -1; dx <= 1 && !edge; ++dx) {
        if (dx == 0 && dy == 0) continue;
        auto it = seen.find({cell.x + dx, cell.y + dy});
        if (it != seen.end() && it->second != Ignition::kBurning) edge = true;
      }
    }
    if (edge) best_front = std::min(best_front, d);
  }
  if (std::isfinite(best_front)) return best_front;
  if (std::isfinite(best_any)) return best_any;
  return std::nullopt;
}

double objective_reward(const Observation& obs, const UavState& uav, const RewardConfig& cfg) {
  if (obs.readings.empty()) return 0.0;
  const auto n_det = std::count_if(obs.readings.begin(), obs.readings.end(),
                                   [](const CellReading& r) { return r.reading == Ignition::kBurning; });
  double r = cfg.alpha_det * static_cast<double>(n_det) / static_cast<double>(obs.readings.size());
  if (auto d = observed_frontline_distance(obs, uav.pos)) r += cfg.alpha_mon * std::exp(-*d);
  return r;
}

double constraint_reward(const UavState& uav_after, double movement_energy, const EnvState& env,
                         const RewardConfig& cfg, const AgentConfig& agent) {
  double r = -cfg.alpha_mvm * movement_energy;
  if (uav_after.battery < agent.battery_threshold) r += cfg.alpha_p * cfg.r_btr;
  if (env.ignition[uav_after.pos] == Ignition::kBurning) r += cfg.alpha_brn * cfg.r_brn;
  return r;
}

double bernoulli_kl(double p, double q) {
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return kl;
}

double info_reward(std::span<const double> belief_fov, std::span<const Ignition> readings, double alpha_bel) {
  if (belief_fov.size() != readings.size()) fail(ErrorCode::kInvalidArgument, "info_reward: window size mismatch");
  if (alpha_bel == 0.0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    const double z = std::clamp(readings[i] == Ignition::kBurning ? 1.0 : 0.0, kProbabilityClamp,
                                1.0 - kProbabilityClamp);
    const double b = std::clamp(belief_fov[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += bernoulli_kl(z, b);
  }
  return -alpha_bel * total;
}

double total_reward(const RewardParts& parts) { return parts.objective + parts.constraint + parts.info; }

RewardConfig constant_schedule(const RewardConfig& base, MissionPhase, int) { return base; }

}  // namespace pyrofront

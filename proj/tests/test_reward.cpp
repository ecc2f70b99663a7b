#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "pyrofront/reward.hpp"

using namespace pyrofront;

namespace {

// 5x5 observation centered at (2, 2) of a 5x5 grid; `burning` lists cells
// read as burning.
Observation window(const std::vector<Cell>& burning, Cell center = {2, 2}) {
  Observation obs;
  obs.center = center;
  obs.fov = 5;
  for (int y = center.y - 2; y <= center.y + 2; ++y)
    for (int x = center.x - 2; x <= center.x + 2; ++x) {
      CellReading r;
      r.cell = {x, y};
      for (Cell b : burning)
        if (b == r.cell) r.reading = Ignition::kBurning;
      obs.readings.push_back(r);
    }
  return obs;
}

UavState uav_at(Cell c, double battery = 100.0) {
  UavState u;
  u.pos = c;
  u.battery = battery;
  return u;
}

}  // namespace

TEST(ObjectiveReward, NoFireIsZero) {
  RewardConfig cfg;
  EXPECT_EQ(objective_reward(window({}), uav_at({2, 2}), cfg), 0.0);
}

TEST(ObjectiveReward, FiveOfTwentyFiveAtUnitDistance) {
  RewardConfig cfg;
  // A burning column at x = 3: nearest frontline cell is one cell away.
  const auto obs = window({{3, 0}, {3, 1}, {3, 2}, {3, 3}, {3, 4}});
  const double expected = 10.0 * 5.0 / 25.0 + 10.0 * std::exp(-1.0);
  EXPECT_NEAR(objective_reward(obs, uav_at({2, 2}), cfg), expected, 1e-12);
  EXPECT_NEAR(expected, 5.679, 1e-3);
}

TEST(ObjectiveReward, OverFrontlineGivesFullMonitoringTerm) {
  RewardConfig cfg;
  cfg.alpha_det = 0.0;
  EXPECT_NEAR(objective_reward(window({{2, 2}}), uav_at({2, 2}), cfg), cfg.alpha_mon, 1e-12);
}

TEST(ObjectiveReward, BoundedAndLinearInDetection) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    std::vector<Cell> burning;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        if (uniform01(rng) < 0.4) burning.push_back({x, y});
    const auto obs = window(burning);
    RewardConfig cfg;
    const double r = objective_reward(obs, uav_at({2, 2}), cfg);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, cfg.alpha_det + cfg.alpha_mon);
    RewardConfig det_only = cfg;
    det_only.alpha_mon = 0.0;
    RewardConfig doubled = det_only;
    doubled.alpha_det *= 2.0;
    EXPECT_DOUBLE_EQ(objective_reward(obs, uav_at({2, 2}), doubled), 2.0 * objective_reward(obs, uav_at({2, 2}), det_only));
  }
}

TEST(ConstraintReward, HoverOnSafeCell) {
  RewardConfig cfg;
  AgentConfig agent;
  const EnvState env = pftest::blank_env(5);
  EXPECT_NEAR(constraint_reward(uav_at({1, 1}), agent.hover_cost, env, cfg, agent), -cfg.alpha_mvm * agent.hover_cost,
              1e-15);
}

TEST(ConstraintReward, OverBurningCellCostsBurnoutPenalty) {
  RewardConfig cfg;
  AgentConfig agent;
  EnvState env = pftest::blank_env(5);
  env.ignition(1, 1) = Ignition::kBurning;
  EXPECT_NEAR(constraint_reward(uav_at({1, 1}), 0.0, env, cfg, agent), -200.0, 1e-12);
  env.ignition(1, 1) = Ignition::kBurnt;
  EXPECT_NEAR(constraint_reward(uav_at({1, 1}), 0.0, env, cfg, agent), 0.0, 1e-12);
}

TEST(ConstraintReward, DownwindMoveAndLowBattery) {
  RewardConfig cfg;
  AgentConfig agent;
  const EnvState env = pftest::blank_env(5);
  const double energy = movement_cost(Action::kE, 0.0, agent);
  EXPECT_NEAR(constraint_reward(uav_at({1, 1}), energy, env, cfg, agent), 0.0, 1e-15);
  agent.move_hover_ratio = 7.0;
  EXPECT_NEAR(movement_cost(Action::kE, 0.0, agent), 0.0, 1e-15);
  EXPECT_NEAR(constraint_reward(uav_at({1, 1}, 10.0), 0.0, env, cfg, agent), cfg.alpha_p * cfg.r_btr, 1e-12);
}

TEST(InfoReward, MatchingBeliefIsZero) {
  const std::vector<double> b = {0.0, 1.0, 0.0};
  const std::vector<Ignition> z = {Ignition::kUnburnt, Ignition::kBurning, Ignition::kBurnt};
  EXPECT_NEAR(info_reward(b, z, 40.0), 0.0, 1e-12);
}

TEST(InfoReward, UniformBeliefMatchesClosedForm) {
  std::vector<double> b(25, 0.5);
  std::vector<Ignition> z(25, Ignition::kUnburnt);
  for (int i = 0; i < 7; ++i) z[i] = Ignition::kBurning;
  // KL(Bern(p) || Bern(1/2)) = log 2 + p log p + (1 - p) log(1 - p), p clamped.
  const double p = 1e-6;
  const double kl = std::log(2.0) + p * std::log(p) + (1 - p) * std::log(1 - p);
  EXPECT_NEAR(info_reward(b, z, 40.0), -40.0 * 25.0 * kl, 1e-9);
  EXPECT_NEAR(info_reward(b, z, 40.0), -40.0 * 25.0 * std::log(2.0), 0.05);
}

TEST(InfoReward, ZeroCoefficientAndSign) {
  std::vector<double> b = {0.3, 0.9};
  std::vector<Ignition> z = {Ignition::kBurning, Ignition::kUnburnt};
  EXPECT_EQ(info_reward(b, z, 0.0), 0.0);
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> bb(9);
    std::vector<Ignition> zz(9);
    for (int k = 0; k < 9; ++k) {
      bb[k] = uniform01(rng);
      zz[k] = static_cast<Ignition>(uniform_int(rng, 0, 2));
    }
    EXPECT_LE(info_reward(bb, zz, 40.0), 0.0);
  }
  EXPECT_THROW(info_reward(std::vector<double>(3, 0.5), std::vector<Ignition>(2), 1.0), std::exception);
}

TEST(InfoReward, MismatchPenalizedMore) {
  const std::vector<Ignition> z = {Ignition::kBurning};
  EXPECT_LT(info_reward(std::vector<double>{0.2}, z, 1.0), info_reward(std::vector<double>{0.8}, z, 1.0));
}

TEST(TotalReward, Sums) {
  EXPECT_EQ(total_reward({}), 0.0);
  EXPECT_NEAR(total_reward({5.679, -0.2, 0.0}), 5.479, 1e-12);
}

TEST(Schedule, ConstantKeepsCoefficients) {
  RewardConfig cfg;
  cfg.alpha_det = 3.0;
  EXPECT_EQ(constant_schedule(cfg, MissionPhase::kScan, 7).alpha_det, 3.0);
}

#ifndef PYROFRONT_BELIEF_HPP_
#define PYROFRONT_BELIEF_HPP_

#include <cstdint>

#include "pyrofront/config.hpp"
#include "pyrofront/grid.hpp"
#include "pyrofront/sim.hpp"
#include "pyrofront/uav.hpp"

namespace pyrofront {

// Linear staleness weight of an observation taken at t_obs, seen at t.
double certainty(int t, int t_obs, int t_max);

// Last reading per cell and its age. Drives the observation-mode network
// input.
class CertaintyMap {
 public:
  static constexpr std::int8_t kUnseen = -1;

  CertaintyMap() = default;
  explicit CertaintyMap(int n);

  void record(const Observation& obs);
  void refresh(int t, int t_max);

  int size() const { return last_.size(); }
  const Grid<std::int8_t>& last() const { return last_; }
  const Grid<int>& t_obs() const { return t_obs_; }
  const Grid<double>& values() const { return c_; }
  bool seen(Cell c) const { return last_[c] != kUnseen; }
  double observed_fraction() const;

 private:
  Grid<std::int8_t> last_;
  Grid<int> t_obs_;
  Grid<double> c_;
};

// Burning-indicator of the last reading times its certainty at t; unseen 0.
Grid<double> certainty_weighted_observation(const CertaintyMap& cmap, int t, int t_max);

// Per-cell probability of being burning, backed by Beta(alpha, beta).
// Non-vegetated cells stay at b = 0.
struct BeliefMap {
  Grid<double> b;
  Grid<double> alpha;
  Grid<double> beta;
  Grid<double> burnt_mass;
  Grid<std::uint8_t> vegetated;

  int size() const { return b.size(); }
  // Sets the mean of a vegetated cell, rescaling (alpha, beta) so their sum
  // (the evidence mass) is unchanged.
  void set_mean(Cell c, double mean);
};

BeliefMap init_belief(const Grid<double>& density, const Grid<int>& veg_type, double alpha0, double beta0);

// Conjugate increment per observed cell; a burnt reading pins b = 0.
void correct_belief(BeliefMap& map, const Observation& obs);

// Two-state transition b' = (1 - b) p01 + b (1 - p12) on every vegetated cell.
void bayes_transition(BeliefMap& map, const Grid<double>& p01, const Grid<double>& p12);

// Agent-side spread parameters used for prediction.
struct SpreadModel {
  double sigma = 1.0;
  int radius = 3;
};

// Model-based prediction from the agent's estimates. fuel_fraction is the
// estimated remaining fuel over initial fuel; <= 0 marks an exhausted cell
// (p12 = 1, no further ignition).
void predict_belief(BeliefMap& map, const Grid<double>& est_wind_mag, const Grid<double>& est_wind_phase,
                    const Grid<double>& fuel_fraction, const SpreadModel& model);

// Exact transition using the hidden state: p01 is the true ignition
// probability, p12 the noise-free burnout indicator. Test mode only.
void oracle_bayes_update(BeliefMap& map, const EnvState& env, const EnvConfig& env_cfg, const BeliefConfig& cfg);

// Wind and fuel estimates the agent builds from its own readings.
class SpreadEstimator {
 public:
  SpreadEstimator() = default;
  SpreadEstimator(const Grid<double>& density, const Grid<int>& veg_type, const EnvConfig& env_cfg);

  void observe(const Observation& obs);
  // Refreshes the wind estimate and integrates the fuel model of cells the
  // belief holds as burning.
  void advance(const BeliefMap& map, int t, int t_max);

  const Grid<double>& wind_mag() const { return wind_mag_; }
  const Grid<double>& wind_phase() const { return wind_phase_; }
  const Grid<double>& fuel_fraction() const { return fuel_fraction_; }

 private:
  Grid<int> veg_type_;
  Grid<double> burnout_fraction_;
  Grid<double> last_mag_;
  Grid<double> last_phase_;
  Grid<int> t_wind_;
  Grid<double> wind_mag_;
  Grid<double> wind_phase_;
  Grid<double> fuel_fraction_;
  Grid<std::uint8_t> active_;
};

}  // namespace pyrofront

#endif  // PYROFRONT_BELIEF_HPP_

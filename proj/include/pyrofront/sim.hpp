#ifndef PYROFRONT_SIM_HPP_
#define PYROFRONT_SIM_HPP_

#include <cstdint>
#include <vector>

#include "pyrofront/config.hpp"
#include "pyrofront/grid.hpp"
#include "pyrofront/rng.hpp"

namespace pyrofront {

enum class Ignition : std::uint8_t { kUnburnt = 0, kBurning = 1, kBurnt = 2 };

// Hidden environment state. Vegetation (density, veg_type) and the spatial
// wind components are fixed for an episode; everything else evolves.
struct EnvState {
  int n = 0;
  int t = 0;
  Grid<Ignition> ignition;
  Grid<double> fuel;
  Grid<double> initial_fuel;
  Grid<double> wind_mag;
  Grid<double> wind_phase;  // direction the wind blows toward, [0, 2pi)
  Grid<double> base_wind_mag;
  Grid<double> base_wind_phase;
  Grid<double> density;  // 0 on non-vegetated cells
  Grid<int> veg_type;    // 0 on non-vegetated cells
  bool frozen = false;   // static scenario: ignition and fuel no longer evolve

  bool vegetated(Cell c) const { return veg_type[c] > 0; }
  double max_wind() const;
  std::uint64_t hash() const;
};

double wrap_angle(double a);

// Initial phase pattern phi_0(x, y).
double initial_wind_phase(WindPattern pattern, int x, int y, int n, double m_phi);

// Radial-basis initial magnitude; min_dist2 is the squared distance to the
// nearest initially ignited cell.
double initial_wind_magnitude(double amplitude, double eps_rad, double min_dist2);

// Temporal offsets added to the spatial wind components at step t.
double phase_offset(const EnvConfig& cfg, int t);
double magnitude_offset(const EnvConfig& cfg, int t);

EnvState init_environment(const EnvConfig& cfg, std::uint64_t seed);

// Recomputes wind_mag / wind_phase for state.t.
void wind_step(EnvState& state, const EnvConfig& cfg);

// Factors of the per-source conditional spread probability. wind_term is
// 1/2 (1 + W_par / max A), or 1/2 when max A is zero.
struct SpreadFactors {
  double adjacency = 0.0;
  double fuel = 0.0;
  double wind_term = 0.0;
  double probability() const;  // product clamped to [0, 1]
};

SpreadFactors spread_factors(double dist2, double sigma, double fuel_fraction_remaining, double wind_mag,
                             double wind_phase, double bearing, double max_wind);

double bearing(Cell from, Cell to);

// Conditional probability that `source` ignites `target` in one step.
// Requires source burning, target unburnt and within the neighborhood radius.
double spread_probability(const EnvState& state, const EnvConfig& cfg, Cell source, Cell target);

struct SourceWeight {
  Cell source;
  double weight = 0.0;
};

// Normalized exp(-d^2) weights over burning cells within the neighborhood of
// `target`. Empty when no source is in range.
std::vector<SourceWeight> source_weights(const EnvState& state, const EnvConfig& cfg, Cell target);

// Total one-step ignition probability of an unburnt vegetated cell.
double ignition_probability(const EnvState& state, const EnvConfig& cfg, Cell target);

// Noise-free fuel after one step of consumption for a burning cell.
double decayed_fuel(const EnvState& state, double wind_max_cap, Cell c);

bool burns_out(const EnvConfig& cfg, double fuel);

void env_step(EnvState& state, const EnvConfig& cfg, Rng& rng);

// Static scenario: grows the fire for static_warmup_steps, then freezes the
// ignition and fuel grids. Dynamic scenario: no-op.
void prepare_scenario(EnvState& state, const EnvConfig& cfg, Scenario scenario, Rng& rng);

}  // namespace pyrofront

#endif  // PYROFRONT_SIM_HPP_

#ifndef PYROFRONT_UAV_HPP_
#define PYROFRONT_UAV_HPP_

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pyrofront/config.hpp"
#include "pyrofront/grid.hpp"
#include "pyrofront/rng.hpp"
#include "pyrofront/sim.hpp"

namespace pyrofront {

// Eight compass moves at k*pi/4 (k = 0 is east, counter-clockwise) plus hover.
enum class Action : std::uint8_t { kE = 0, kNE, kN, kNW, kW, kSW, kS, kSE, kHover };
inline constexpr int kNumActions = 9;

inline int index_of(Action a) { return static_cast<int>(a); }
inline Action action_from_index(int i) { return static_cast<Action>(i); }
inline bool is_move(Action a) { return a != Action::kHover; }
double action_angle(Action a);
Cell action_delta(Action a);
std::string to_string(Action a);

class ActionSet {
 public:
  void insert(Action a) { bits_.set(index_of(a)); }
  void erase(Action a) { bits_.reset(index_of(a)); }
  bool contains(Action a) const { return bits_.test(index_of(a)); }
  bool empty() const { return bits_.none(); }
  int size() const { return static_cast<int>(bits_.count()); }
  std::vector<Action> to_vector() const;
  static ActionSet all();

 private:
  std::bitset<kNumActions> bits_;
};

struct UavState {
  Cell pos;
  std::optional<int> heading;  // compass index 0..7; empty = hover-neutral
  double battery = 100.0;
  bool last_action_was_hover = false;
};

UavState initial_uav(const AgentConfig& cfg);

// Absolute angular difference folded to [0, pi].
double angular_deviation(double a, double b);

ActionSet valid_actions(const UavState& uav, int grid_size, double steer_limit_rad);

// Battery drawn by one action: hover_cost on hover, ratio * beta * move_cost
// on moves, beta = 1 - cos(action angle - wind angle).
double movement_cost(Action action, double wind_phase, const AgentConfig& cfg);

struct WindSample {
  double magnitude = 0.0;
  double phase = 0.0;
};

UavState apply_action(const UavState& uav, Action action, WindSample wind_at_uav, const AgentConfig& cfg);

struct CellReading {
  Cell cell;
  Ignition reading = Ignition::kUnburnt;
  int t = 0;
  double wind_mag = 0.0;  // local wind measured alongside the ignition reading
  double wind_phase = 0.0;
};

// FOV readings, clipped at the grid border, in row-major order.
struct Observation {
  Cell center;
  int fov = 0;
  int t = 0;
  std::vector<CellReading> readings;
};

Ignition sample_reading(const ErrorMatrix& error, Ignition truth, Rng& rng);

Observation observe(const EnvState& env, const UavState& uav, const AgentConfig& cfg, Rng& rng);

// Cells covered by a FOV of side `fov` centered at `center`, clipped.
std::vector<Cell> fov_cells(Cell center, int fov, int grid_size);

}  // namespace pyrofront

#endif  // PYROFRONT_UAV_HPP_

#include "pyrofront/uav.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pyrofront/error.hpp"

namespace pyrofront {

namespace {

constexpr std::array<Cell, 8> kDeltas = {{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

// Guards the strict "< limit" comparison against rounding in k*pi/4.
constexpr double kAngleSlack = 1e-9;

}  // namespace

double action_angle(Action a) { return index_of(a) * std::numbers::pi / 4.0; }

Cell action_delta(Action a) { return is_move(a) ? kDeltas[index_of(a)] : Cell{0, 0}; }

std::string to_string(Action a) {
  static const std::array<const char*, kNumActions> names = {"E", "NE", "N", "NW", "W", "SW", "S", "SE", "H"};
  return names[index_of(a)];
}

std::vector<Action> ActionSet::to_vector() const {
  std::vector<Action> out;
  for (int i = 0; i < kNumActions; ++i)
    if (bits_.test(i)) out.push_back(action_from_index(i));
  return out;
}

ActionSet ActionSet::all() {
  ActionSet s;
  for (int i = 0; i < kNumActions; ++i) s.insert(action_from_index(i));
  return s;
}

UavState initial_uav(const AgentConfig& cfg) {
  UavState u;
  u.pos = {cfg.start_x, cfg.start_y};
  u.battery = cfg.battery_init;
  return u;
}

double angular_deviation(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * std::numbers::pi);
  return d > std::numbers::pi ? 2.0 * std::numbers::pi - d : d;
}

ActionSet valid_actions(const UavState& uav, int grid_size, double steer_limit_rad) {
  ActionSet out;
  out.insert(Action::kHover);
  const bool constrained = uav.heading.has_value() && !uav.last_action_was_hover;
  for (int k = 0; k < 8; ++k) {
    const Action a = action_from_index(k);
    const Cell d = kDeltas[k];
    const Cell next{uav.pos.x + d.x, uav.pos.y + d.y};
    if (next.x < 0 || next.y < 0 || next.x >= grid_size || next.y >= grid_size) continue;
    if (constrained) {
      const double dev = angular_deviation(action_angle(a), action_angle(action_from_index(*uav.heading)));
      if (dev >= steer_limit_rad - kAngleSlack) continue;
    }
    out.insert(a);
  }
  return out;
}

double movement_cost(Action action, double wind_phase, const AgentConfig& cfg) {
  if (!is_move(action)) return cfg.hover_cost;
  const double beta = 1.0 - std::cos(action_angle(action) - wind_phase);
  return cfg.move_hover_ratio * beta * cfg.move_cost;
}

UavState apply_action(const UavState& uav, Action action, WindSample wind_at_uav, const AgentConfig& cfg) {
  UavState next = uav;
  if (is_move(action)) {
    const Cell d = action_delta(action);
    next.pos = {uav.pos.x + d.x, uav.pos.y + d.y};
    next.heading = index_of(action);
  }
  next.last_action_was_hover = !is_move(action);
  next.battery = std::clamp(uav.battery - movement_cost(action, wind_at_uav.phase, cfg), 0.0, 100.0);
  return next;
}

Ignition sample_reading(const ErrorMatrix& error, Ignition truth, Rng& rng) {
  const auto& row = error[static_cast<int>(truth)];
  const double u = uniform01(rng);
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    acc += row[k];
    if (u < acc) return static_cast<Ignition>(k);
  }
  // Rounding leftovers when the row sums to slightly under one.
  for (int k = 2; k >= 0; --k)
    if (row[k] > 0.0) return static_cast<Ignition>(k);
  return truth;
}

std::vector<Cell> fov_cells(Cell center, int fov, int grid_size) {
  const int half = fov / 2;
  std::vector<Cell> out;
  for (int y = std::max(0, center.y - half); y <= std::min(grid_size - 1, center.y + half); ++y)
    for (int x = std::max(0, center.x - half); x <= std::min(grid_size - 1, center.x + half); ++x)
      out.push_back({x, y});
  return out;
}

Observation observe(const EnvState& env, const UavState& uav, const AgentConfig& cfg, Rng& rng) {
  if (!env.ignition.contains(uav.pos)) fail(ErrorCode::kInvalidArgument, "observe: UAV outside grid");
  Observation obs;
  obs.center = uav.pos;
  obs.fov = cfg.fov;
  obs.t = env.t;
  for (Cell c : fov_cells(uav.pos, cfg.fov, env.n)) {
    CellReading r;
    r.cell = c;
    r.reading = sample_reading(cfg.classification_error, env.ignition[c], rng);
    r.t = env.t;
    r.wind_mag = env.wind_mag[c];
    r.wind_phase = env.wind_phase[c];
    obs.readings.push_back(r);
  }
  return obs;
}

}  // namespace pyrofront

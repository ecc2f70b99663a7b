#include "pyrofront/belief.hpp"

#include <algorithm>
#include <cmath>

#include "pyrofront/error.hpp"

namespace pyrofront {

namespace {

constexpr double kMinParam = 1e-12;
constexpr double kNonVegetatedAlpha = 1e-9;
constexpr double kNonVegetatedBeta = 1e9;
constexpr double kActivationBelief = 0.5;
constexpr double kRevivedFuel = 0.1;

}  // namespace

double certainty(int t, int t_obs, int t_max) {
  return std::clamp(1.0 - static_cast<double>(t - t_obs) / t_max, 0.0, 1.0);
}

CertaintyMap::CertaintyMap(int n) : last_(n, kUnseen), t_obs_(n, 0), c_(n, 0.0) {}

void CertaintyMap::record(const Observation& obs) {
  for (const auto& r : obs.readings) {
    last_[r.cell] = static_cast<std::int8_t>(r.reading);
    t_obs_[r.cell] = r.t;
    c_[r.cell] = 1.0;
  }
}

void CertaintyMap::refresh(int t, int t_max) {
  const int n = size();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) c_(x, y) = last_(x, y) == kUnseen ? 0.0 : certainty(t, t_obs_(x, y), t_max);
  }
}

double CertaintyMap::observed_fraction() const {
  const auto cells = last_.data();
  const auto seen = std::count_if(cells.begin(), cells.end(), [](std::int8_t v) { return v != kUnseen; });
  return cells.empty() ? 0.0 : static_cast<double>(seen) / static_cast<double>(cells.size());
}

Grid<double> certainty_weighted_observation(const CertaintyMap& cmap, int t, int t_max) {
  const int n = cmap.size();
  Grid<double> out(n, 0.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (cmap.last()(x, y) != static_cast<std::int8_t>(Ignition::kBurning)) continue;
      out(x, y) = certainty(t, cmap.t_obs()(x, y), t_max);
    }
  }
  return out;
}

void BeliefMap::set_mean(Cell c, double mean) {
  mean = std::clamp(mean, 0.0, 1.0);
  const double mass = alpha[c] + beta[c];
  alpha[c] = std::max(mean * mass, kMinParam);
  beta[c] = std::max((1.0 - mean) * mass, kMinParam);
  b[c] = mean;
}

BeliefMap init_belief(const Grid<double>& density, const Grid<int>& veg_type, double alpha0, double beta0) {
  const int n = density.size();
  if (veg_type.size() != n) fail(ErrorCode::kInvalidArgument, "init_belief: grid size mismatch");
  BeliefMap m;
  m.b = Grid<double>(n, 0.0);
  m.alpha = Grid<double>(n, kNonVegetatedAlpha);
  m.beta = Grid<double>(n, kNonVegetatedBeta);
  m.burnt_mass = Grid<double>(n, 0.0);
  m.vegetated = Grid<std::uint8_t>(n, 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int v = veg_type(x, y);
      const double rho = density(x, y);
      if (v == 0 && rho == 0.0) continue;
      if (v <= 0 || rho <= 0.0) {
        fail(ErrorCode::kInvalidArgument, "init_belief: vegetated cell (" + std::to_string(x) + "," +
                                              std::to_string(y) + ") has zero density or type");
      }
      m.vegetated(x, y) = 1;
      m.alpha(x, y) = v / rho * alpha0;
      m.beta(x, y) = rho / v * beta0;
      m.b(x, y) = m.alpha(x, y) / (m.alpha(x, y) + m.beta(x, y));
    }
  }
  return m;
}

void correct_belief(BeliefMap& map, const Observation& obs) {
  for (const auto& r : obs.readings) {
    const Cell c = r.cell;
    if (!map.b.contains(c) || !map.vegetated[c]) continue;
    if (r.reading == Ignition::kBurnt) {
      map.set_mean(c, 0.0);
      map.burnt_mass[c] = 1.0;
      continue;
    }
    map.burnt_mass[c] = 0.0;
    if (r.reading == Ignition::kBurning) {
      map.alpha[c] += 1.0;
    } else {
      map.beta[c] += 1.0;
    }
    map.b[c] = map.alpha[c] / (map.alpha[c] + map.beta[c]);
  }
}

void bayes_transition(BeliefMap& map, const Grid<double>& p01, const Grid<double>& p12) {
  const int n = map.size();
  if (p01.size() != n || p12.size() != n) fail(ErrorCode::kInvalidArgument, "bayes_transition: size mismatch");
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      if (!map.vegetated[c]) continue;
      const double b = map.b[c];
      const double next = (1.0 - b) * p01[c] + b * (1.0 - p12[c]);
      map.burnt_mass[c] = std::min(1.0, map.burnt_mass[c] + b * p12[c]);
      map.set_mean(c, next);
    }
  }
}

void predict_belief(BeliefMap& map, const Grid<double>& est_wind_mag, const Grid<double>& est_wind_phase,
                    const Grid<double>& fuel_fraction, const SpreadModel& model) {
  const int n = map.size();
  if (est_wind_mag.size() != n || est_wind_phase.size() != n || fuel_fraction.size() != n) {
    fail(ErrorCode::kInvalidArgument, "predict_belief: size mismatch");
  }
  double max_a = 0.0;
  for (double a : est_wind_mag.data()) max_a = std::max(max_a, a);

  Grid<double> p01(n, 0.0);
  Grid<double> p12(n, 0.0);
  const int r = model.radius;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell target{x, y};
      if (!map.vegetated[target]) continue;
      const bool exhausted = fuel_fraction[target] <= 0.0 || map.burnt_mass[target] >= 1.0;
      if (exhausted) {
        p12[target] = 1.0;
        continue;
      }
      double p = 0.0;
      for (int sy = y - r; sy <= y + r; ++sy) {
        for (int sx = x - r; sx <= x + r; ++sx) {
          const Cell src{sx, sy};
          if (src == target || !map.b.contains(src) || !map.vegetated[src]) continue;
          const double bs = map.b[src];
          if (bs <= 0.0) continue;
          const double d2 = cell_distance2(src, target);
          if (d2 > r * r) continue;
          const auto f = spread_factors(d2, model.sigma, std::max(fuel_fraction[src], 0.0), est_wind_mag[src],
                                        est_wind_phase[src], bearing(src, target), max_a);
          p += bs * f.probability();
        }
      }
      p01[target] = std::clamp(p, 0.0, 1.0);
    }
  }
  bayes_transition(map, p01, p12);
}

void oracle_bayes_update(BeliefMap& map, const EnvState& env, const EnvConfig& env_cfg, const BeliefConfig& cfg) {
  if (!cfg.test_mode) fail(ErrorCode::kState, "oracle_bayes_update requires belief.test_mode");
  const int n = map.size();
  if (env.n != n) fail(ErrorCode::kInvalidArgument, "oracle_bayes_update: size mismatch");
  Grid<double> p01(n, 0.0);
  Grid<double> p12(n, 0.0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      switch (env.ignition[c]) {
        case Ignition::kUnburnt:
          if (!env.frozen) p01[c] = ignition_probability(env, env_cfg, c);
          break;
        case Ignition::kBurning:
          if (!env.frozen && burns_out(env_cfg, decayed_fuel(env, env_cfg.wind_max, c))) p12[c] = 1.0;
          break;
        case Ignition::kBurnt:
          break;
      }
    }
  }
  bayes_transition(map, p01, p12);
}

SpreadEstimator::SpreadEstimator(const Grid<double>& density, const Grid<int>& veg_type, const EnvConfig& env_cfg)
    : veg_type_(veg_type),
      burnout_fraction_(density.size(), 0.0),
      last_mag_(density.size(), 0.0),
      last_phase_(density.size(), 0.0),
      t_wind_(density.size(), -1),
      wind_mag_(density.size(), 0.0),
      wind_phase_(density.size(), 0.0),
      fuel_fraction_(density.size(), 1.0),
      active_(density.size(), 0) {
  const int n = density.size();
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double f0 = density(x, y) / env_cfg.base_density * env_cfg.base_fuel;
      burnout_fraction_(x, y) = f0 > 0.0 ? env_cfg.burnout_fuel * env_cfg.base_fuel / f0 : 1.0;
    }
  }
}

void SpreadEstimator::observe(const Observation& obs) {
  for (const auto& r : obs.readings) {
    const Cell c = r.cell;
    last_mag_[c] = r.wind_mag;
    last_phase_[c] = r.wind_phase;
    t_wind_[c] = r.t;
    switch (r.reading) {
      case Ignition::kUnburnt:
        active_[c] = 0;
        fuel_fraction_[c] = 1.0;
        break;
      case Ignition::kBurning:
        // Read as burning after the model declared it exhausted: restart
        // from a small remainder instead of pinning p12 = 1.
        if (fuel_fraction_[c] <= 0.0) {
          fuel_fraction_[c] = kRevivedFuel;
          active_[c] = 1;
        }
        break;
      case Ignition::kBurnt:
        active_[c] = 0;
        fuel_fraction_[c] = 0.0;
        break;
    }
  }
}

void SpreadEstimator::advance(const BeliefMap& map, int t, int t_max) {
  const int n = map.size();
  double mean_x = 0.0;
  double mean_y = 0.0;
  int measured = 0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (t_wind_(x, y) < 0) continue;
      mean_x += last_mag_(x, y) * std::cos(last_phase_(x, y));
      mean_y += last_mag_(x, y) * std::sin(last_phase_(x, y));
      ++measured;
    }
  }
  if (measured > 0) {
    mean_x /= measured;
    mean_y /= measured;
  }
  double max_a = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double wx = mean_x;
      double wy = mean_y;
      if (t_wind_(x, y) >= 0) {
        const double c = certainty(t, t_wind_(x, y), t_max);
        wx = c * last_mag_(x, y) * std::cos(last_phase_(x, y)) + (1.0 - c) * mean_x;
        wy = c * last_mag_(x, y) * std::sin(last_phase_(x, y)) + (1.0 - c) * mean_y;
      }
      wind_mag_(x, y) = std::hypot(wx, wy);
      wind_phase_(x, y) = wrap_angle(std::atan2(wy, wx));
      max_a = std::max(max_a, wind_mag_(x, y));
    }
  }

  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Cell c{x, y};
      if (!map.vegetated[c] || fuel_fraction_[c] <= 0.0) continue;
      if (!active_[c] && map.b[c] >= kActivationBelief) active_[c] = 1;
      if (!active_[c]) continue;
      const double ratio = max_a > 0.0 ? wind_mag_[c] / max_a : 0.0;
      fuel_fraction_[c] *= std::exp(-veg_type_[c] * ratio);
      if (fuel_fraction_[c] <= burnout_fraction_[c]) fuel_fraction_[c] = 0.0;
    }
  }
}

}  // namespace pyrofront
